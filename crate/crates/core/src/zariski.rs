//! Exact nefness / pseudo-effectivity tests and Zariski decomposition
//! against a surface's negative-curve catalog.
//!
//! The decomposition uses the classical successive-support procedure: start
//! with the catalog curves pairing negatively against `D`, solve the
//! orthogonality system on that support exactly, and grow the support by
//! every curve the candidate nef part still meets negatively. The support
//! Gram stays negative definite for pseudo-effective inputs; any failure of
//! that certificate, a negative coefficient, or a final part outside the
//! positive cone witnesses non-pseudo-effectivity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::ns_lattice::{CurveEntry, DivClass, SurfaceModel};
use crate::rat::Rat;

/// Negative-definiteness witness: leading principal minors of the support
/// Gram matrix, which must alternate in sign starting negative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NegDefCertificate {
    pub support: Vec<String>,
    pub leading_minors: Vec<Rat>,
}

impl NegDefCertificate {
    pub fn signs_alternate(&self) -> bool {
        self.leading_minors.iter().enumerate().all(|(i, m)| {
            if i % 2 == 0 {
                m.is_negative()
            } else {
                m.is_positive()
            }
        })
    }
}

/// `D = P + sum a_i C_i` with `P` nef, `P . C_i = 0`, all `a_i > 0` and the
/// support Gram negative definite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZariskiDecomp {
    pub positive: DivClass,
    pub negative_support: Vec<(CurveEntry, Rat)>,
    pub certificate: NegDefCertificate,
    /// False when the catalog is not known complete; every downstream report
    /// then labels results as an upper bound only.
    pub trusted: bool,
}

impl ZariskiDecomp {
    /// Volume of the decomposed class: `P^2`.
    pub fn volume(&self, s: &SurfaceModel) -> Rat {
        s.pair(&self.positive, &self.positive)
    }

    pub fn negative_part(&self, rank: usize) -> DivClass {
        let mut n = DivClass::zero(rank);
        for (c, a) in &self.negative_support {
            n = n.add(&c.cls.scale(a));
        }
        n
    }
}

/// Nefness against the catalog plus the positive cone: `D . C >= 0` for
/// every catalog curve, `D^2 >= 0` and `D . ample_ref >= 0`. Exact for
/// models with a complete catalog.
pub fn is_nef(d: &DivClass, s: &SurfaceModel) -> Result<bool> {
    if d.len() != s.rank {
        return Err(Error::Input("dimension mismatch".into()));
    }
    Ok(s.curves.iter().all(|c| !s.pair(d, &c.cls).is_negative())
        && !s.self_int(d).is_negative()
        && !s.pair(d, &s.ample_ref).is_negative())
}

/// Decides pseudo-effectivity by running the decomposition and inspecting
/// the outcome; one exact code path, one certificate.
pub fn is_pseudoeffective(d: &DivClass, s: &SurfaceModel) -> Result<bool> {
    if d.len() != s.rank {
        return Err(Error::Input("dimension mismatch".into()));
    }
    Ok(try_decompose(d, s)?.is_some())
}

/// Zariski decomposition of a pseudo-effective class. Non-pseudo-effective
/// input is a domain error.
pub fn zariski_decompose(d: &DivClass, s: &SurfaceModel) -> Result<ZariskiDecomp> {
    if d.len() != s.rank {
        return Err(Error::Input("dimension mismatch".into()));
    }
    try_decompose(d, s)?.ok_or_else(|| {
        Error::Domain(format!(
            "class {} is not pseudo-effective",
            d.format(&s.basis)
        ))
    })
}

/// Precomputed `gram . cls` columns for the hot pairing loops.
pub(crate) struct PairingCache<'a> {
    pub catalog: Vec<&'a CurveEntry>,
    /// `gram . C` for each negative catalog curve.
    pub catalog_gv: Vec<Vec<Rat>>,
    pub nonneg_gv: Vec<Vec<Rat>>,
    pub ample_gv: Vec<Rat>,
}

pub(crate) fn dot(a: &DivClass, gv: &[Rat]) -> Rat {
    a.0.iter().zip(gv).map(|(x, y)| x * y).sum()
}

impl<'a> PairingCache<'a> {
    pub fn new(s: &'a SurfaceModel) -> Self {
        let catalog: Vec<&CurveEntry> = s.negative_curves().collect();
        let nonneg: Vec<&CurveEntry> = s
            .curves
            .iter()
            .filter(|c| !c.self_int.is_negative())
            .collect();
        PairingCache {
            catalog_gv: catalog
                .iter()
                .map(|c| linalg::mat_vec(&s.gram, &c.cls.0))
                .collect(),
            nonneg_gv: nonneg
                .iter()
                .map(|c| linalg::mat_vec(&s.gram, &c.cls.0))
                .collect(),
            ample_gv: linalg::mat_vec(&s.gram, &s.ample_ref.0),
            catalog,
        }
    }
}

/// Core procedure. `Ok(None)` means "not pseudo-effective", with the failed
/// stage of the certificate as the witness.
pub(crate) fn try_decompose(d: &DivClass, s: &SurfaceModel) -> Result<Option<ZariskiDecomp>> {
    let cache = PairingCache::new(s);
    try_decompose_cached(d, s, &cache)
}

pub(crate) fn try_decompose_cached(
    d: &DivClass,
    s: &SurfaceModel,
    cache: &PairingCache,
) -> Result<Option<ZariskiDecomp>> {
    // A class pairing negatively against an ample class, or against a curve
    // of nonnegative square (which lies in the closed positive cone), cannot
    // be pseudo-effective.
    if dot(d, &cache.ample_gv).is_negative() {
        return Ok(None);
    }
    if cache.nonneg_gv.iter().any(|gv| dot(d, gv).is_negative()) {
        return Ok(None);
    }

    let catalog = &cache.catalog;
    let mut in_support = vec![false; catalog.len()];
    for (i, gv) in cache.catalog_gv.iter().enumerate() {
        if dot(d, gv).is_negative() {
            in_support[i] = true;
        }
    }

    loop {
        let support: Vec<usize> = (0..catalog.len()).filter(|&i| in_support[i]).collect();
        let mut coeffs: Vec<Rat> = Vec::new();
        if !support.is_empty() {
            let gram_t: Vec<Vec<Rat>> = support
                .iter()
                .map(|&i| {
                    support
                        .iter()
                        .map(|&j| dot(&catalog[i].cls, &cache.catalog_gv[j]))
                        .collect()
                })
                .collect();
            let minors = linalg::leading_principal_minors(&gram_t);
            let neg_def = minors.iter().enumerate().all(|(k, m)| {
                if k % 2 == 0 {
                    m.is_negative()
                } else {
                    m.is_positive()
                }
            });
            if !neg_def {
                return Ok(None);
            }
            let rhs: Vec<Rat> = support
                .iter()
                .map(|&i| dot(d, &cache.catalog_gv[i]))
                .collect();
            let sol = linalg::solve(&gram_t, &rhs).ok_or_else(|| {
                Error::Internal("negative definite support Gram must be invertible".into())
            })?;
            if sol.iter().any(Rat::is_negative) {
                return Ok(None);
            }
            coeffs = sol;
        }

        let mut n = DivClass::zero(s.rank);
        for (k, &i) in support.iter().enumerate() {
            n = n.add(&catalog[i].cls.scale(&coeffs[k]));
        }
        let p = d.sub(&n);

        let mut grew = false;
        for (i, gv) in cache.catalog_gv.iter().enumerate() {
            if !in_support[i] && dot(&p, gv).is_negative() {
                in_support[i] = true;
                grew = true;
            }
        }
        if !grew {
            // Final positive-cone checks on P.
            if s.self_int(&p).is_negative() || dot(&p, &cache.ample_gv).is_negative() {
                return Ok(None);
            }
            if cache.nonneg_gv.iter().any(|gv| dot(&p, gv).is_negative()) {
                return Ok(None);
            }
            // Drop exactly-zero coefficients; orthogonality is unaffected.
            let kept: Vec<(usize, Rat)> = support
                .iter()
                .zip(&coeffs)
                .filter(|(_, a)| !a.is_zero())
                .map(|(&i, a)| (i, a.clone()))
                .collect();
            let gram_kept: Vec<Vec<Rat>> = kept
                .iter()
                .map(|(i, _)| {
                    kept.iter()
                        .map(|(j, _)| dot(&catalog[*i].cls, &cache.catalog_gv[*j]))
                        .collect()
                })
                .collect();
            let certificate = NegDefCertificate {
                support: kept.iter().map(|(i, _)| catalog[*i].name.clone()).collect(),
                leading_minors: linalg::leading_principal_minors(&gram_kept),
            };
            for (i, _) in &kept {
                if !dot(&p, &cache.catalog_gv[*i]).is_zero() {
                    return Err(Error::Internal(
                        "positive part not orthogonal to its support".into(),
                    ));
                }
            }
            return Ok(Some(ZariskiDecomp {
                positive: p,
                negative_support: kept
                    .into_iter()
                    .map(|(i, a)| (catalog[i].clone(), a))
                    .collect(),
                certificate,
                trusted: s.catalog_complete,
            }));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ns_lattice::{blow_up, builtin_surface, BuiltinSpec, PointSpec};
    use crate::rat::rat;

    fn blown(spec: BuiltinSpec) -> crate::ns_lattice::PointModel {
        let s = builtin_surface(&spec).unwrap();
        blow_up(&s, &PointSpec::General).unwrap()
    }

    /// Independent oracle: enumerate *all* subsets of the negative catalog
    /// and keep those defining a valid decomposition (negative definite
    /// Gram, positive coefficients, nef remainder orthogonal to the
    /// support). Exactly one must survive. Practical for small catalogs.
    fn oracle_decompose(d: &DivClass, s: &SurfaceModel) -> Option<(DivClass, Vec<Rat>)> {
        let catalog: Vec<&CurveEntry> = s.negative_curves().collect();
        assert!(catalog.len() <= 12, "oracle needs a small catalog");
        let mut winners = Vec::new();
        for mask in 0u32..(1 << catalog.len()) {
            let idx: Vec<usize> = (0..catalog.len())
                .filter(|i| mask & (1 << i) != 0)
                .collect();
            let gram_t: Vec<Vec<Rat>> = idx
                .iter()
                .map(|&i| {
                    idx.iter()
                        .map(|&j| s.pair(&catalog[i].cls, &catalog[j].cls))
                        .collect()
                })
                .collect();
            let minors = linalg::leading_principal_minors(&gram_t);
            if !minors.iter().enumerate().all(|(k, m)| {
                if k % 2 == 0 {
                    m.is_negative()
                } else {
                    m.is_positive()
                }
            }) {
                continue;
            }
            let rhs: Vec<Rat> = idx.iter().map(|&i| s.pair(d, &catalog[i].cls)).collect();
            let sol = match linalg::solve(&gram_t, &rhs) {
                Some(sol) if idx.is_empty() || sol.iter().all(Rat::is_positive) => sol,
                Some(_) | None => continue,
            };
            let mut n = DivClass::zero(s.rank);
            for (k, &i) in idx.iter().enumerate() {
                n = n.add(&catalog[i].cls.scale(&sol[k]));
            }
            let p = d.sub(&n);
            if is_nef(&p, s).unwrap() && idx.iter().all(|&i| s.pair(&p, &catalog[i].cls).is_zero())
            {
                winners.push((p, sol));
            }
        }
        assert!(winners.len() <= 1, "oracle found multiple decompositions");
        winners.pop()
    }

    #[test]
    fn nef_examples() {
        let pm = blown(BuiltinSpec::P2);
        let s = &pm.blown;
        // pi*O(1) - E is nef on the boundary
        let d = DivClass::from_ints(&[1, -1]);
        assert!(is_nef(&d, s).unwrap());
        // pi*O(1) - (3/2)E has square -5/4 < 0
        let d = DivClass(vec![Rat::one(), rat(-3, 2)]);
        assert_eq!(s.self_int(&d), rat(-5, 4));
        assert!(!is_nef(&d, s).unwrap());
        // the reference ample class is nef on any model
        assert!(is_nef(&s.ample_ref.clone(), s).unwrap());
    }

    #[test]
    fn pseudoeffective_examples() {
        let pm = blown(BuiltinSpec::P1xP1);
        let s = &pm.blown;
        // (1,1) - 2E = (f1-E) + (f2-E)
        assert!(is_pseudoeffective(&DivClass::from_ints(&[1, 1, -2]), s).unwrap());
        // (1,1) - (5/2)E is not pseudo-effective
        let d = DivClass(vec![Rat::one(), Rat::one(), rat(-5, 2)]);
        assert!(!is_pseudoeffective(&d, s).unwrap());
        // the zero class is pseudo-effective
        assert!(is_pseudoeffective(&DivClass::zero(3), s).unwrap());
    }

    #[test]
    fn decompose_p1xp1_ray_matches_oracle() {
        let pm = blown(BuiltinSpec::P1xP1);
        let s = &pm.blown;
        // D = (1,1) - (3/2)E
        let d = DivClass(vec![Rat::one(), Rat::one(), rat(-3, 2)]);
        let z = zariski_decompose(&d, s).unwrap();
        // N = (1/2)(f1-E) + (1/2)(f2-E), P = (1/2)(f1+f2-E), P^2 = 1/4
        assert_eq!(z.negative_support.len(), 2);
        for (_, a) in &z.negative_support {
            assert_eq!(*a, rat(1, 2));
        }
        assert_eq!(z.positive, DivClass(vec![rat(1, 2), rat(1, 2), rat(-1, 2)]));
        assert_eq!(z.volume(s), rat(1, 4));
        assert!(z.certificate.signs_alternate());

        let (p_oracle, _) = oracle_decompose(&d, s).unwrap();
        assert_eq!(p_oracle, z.positive);

        // reconstruction: P + sum a_i C_i = D
        assert_eq!(z.positive.add(&z.negative_part(s.rank)), d);
    }

    #[test]
    fn decompose_nef_is_identity() {
        let pm = blown(BuiltinSpec::P2);
        let s = &pm.blown;
        let d = DivClass::from_ints(&[1, -1]);
        let z = zariski_decompose(&d, s).unwrap();
        assert!(z.negative_support.is_empty());
        assert_eq!(z.positive, d);
    }

    #[test]
    fn decompose_dp3_anticanonical_ray() {
        let pm = blown(BuiltinSpec::DelPezzo(3));
        let s = &pm.blown;
        // D = pi*(-K) - (7/4)E at t = 7/4 past the nef threshold 3/2
        let mut coords = pm.base.canonical.neg().0;
        coords.push(rat(-7, 4));
        let d = DivClass(coords);
        let z = zariski_decompose(&d, s).unwrap();
        // N = (1/2)(pi*(-K) - 2E); P^2 = 3(2 - 7/4)^2 = 3/16
        assert_eq!(z.negative_support.len(), 1);
        assert_eq!(z.negative_support[0].1, rat(1, 2));
        let mut support_cls = pm.base.canonical.neg().0;
        support_cls.push(Rat::int(-2));
        assert_eq!(z.negative_support[0].0.cls, DivClass(support_cls));
        assert_eq!(z.volume(s), rat(3, 16));
    }

    #[test]
    fn oracle_agreement_along_rays() {
        // sample rational points along the (1,1) ray and compare volumes
        let pm = blown(BuiltinSpec::P1xP1);
        let s = &pm.blown;
        for t in [rat(1, 3), rat(1, 1), rat(5, 4), rat(7, 4), rat(2, 1)] {
            let d = DivClass(vec![Rat::one(), Rat::one(), -t.clone()]);
            let z = zariski_decompose(&d, s).unwrap();
            let (p_oracle, _) = oracle_decompose(&d, s).unwrap();
            assert_eq!(z.positive, p_oracle, "t = {t}");
        }
    }

    #[test]
    fn non_pseudoeffective_is_domain_error() {
        let pm = blown(BuiltinSpec::P1xP1);
        let d = DivClass(vec![Rat::one(), Rat::one(), rat(-5, 2)]);
        assert!(matches!(
            zariski_decompose(&d, &pm.blown),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn support_monotone_along_ray() {
        // support(N(t1)) included in support(N(t2)) for t1 < t2 below tau
        let pm = blown(BuiltinSpec::DelPezzo(3));
        let s = &pm.blown;
        let mk = |t: Rat| {
            let mut coords = pm.base.canonical.neg().0;
            coords.push(-t);
            DivClass(coords)
        };
        let mut prev: Vec<String> = Vec::new();
        for t in [rat(1, 1), rat(8, 5), rat(9, 5), rat(39, 20)] {
            let z = zariski_decompose(&mk(t), s).unwrap();
            let names: Vec<String> = z.certificate.support.clone();
            assert!(prev.iter().all(|n| names.contains(n)));
            prev = names;
        }

        // same nesting on the (1,3) ray, where the supports grow
        // {} < {f2-E} < {f1-E, f2-E}
        let pm = blown(BuiltinSpec::P1xP1);
        let s = &pm.blown;
        let mut prev: Vec<String> = Vec::new();
        let mut sizes = Vec::new();
        for t in [rat(1, 2), rat(2, 1), rat(7, 2)] {
            let d = DivClass(vec![Rat::one(), Rat::int(3), -t.clone()]);
            let z = zariski_decompose(&d, s).unwrap();
            let names: Vec<String> = z.certificate.support.clone();
            assert!(prev.iter().all(|n| names.contains(n)));
            sizes.push(names.len());
            prev = names;
        }
        assert_eq!(sizes, vec![0, 1, 2]);
    }
}
