//! Exact model of a surface's Néron–Severi lattice: intersection pairing,
//! curve catalogs, built-in classical surfaces, point blowups and complete
//! enumeration of negative classes.
//!
//! A [`SurfaceModel`] carries the rank, the intersection Gram matrix
//! (validated to have Hodge signature `(1, rho-1)`), the canonical class, a
//! reference ample class and a catalog of known irreducible curves. The
//! negative entries of the catalog, together with the positive cone, carry
//! all effective/nef cone knowledge: this is exact for Mori dream surfaces,
//! which covers every built-in model. `catalog_complete` records whether the
//! negative entries list *every* irreducible negative class; the flag
//! propagates into every downstream report.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::rat::Rat;

/// A divisor class: a vector of exact rationals in the lattice basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivClass(pub Vec<Rat>);

impl DivClass {
    pub fn zero(rank: usize) -> Self {
        DivClass(vec![Rat::zero(); rank])
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        DivClass(coords.iter().map(|&c| Rat::int(c)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Rat::is_zero)
    }

    pub fn add(&self, other: &DivClass) -> DivClass {
        DivClass(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &DivClass) -> DivClass {
        DivClass(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: &Rat) -> DivClass {
        DivClass(self.0.iter().map(|a| a * c).collect())
    }

    pub fn neg(&self) -> DivClass {
        DivClass(self.0.iter().map(|a| -a).collect())
    }

    /// Renders the class against basis names, e.g. `3H - E1 - 2E2`.
    pub fn format(&self, basis: &[String]) -> String {
        let mut out = String::new();
        for (c, name) in self.0.iter().zip(basis) {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            if mag != Rat::one() {
                out.push_str(&format!("{mag}"));
            }
            out.push_str(name);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

/// A cataloged irreducible curve class with its cached self-intersection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveEntry {
    pub name: String,
    pub cls: DivClass,
    pub self_int: Rat,
    pub arith_genus: Option<u32>,
}

/// Néron–Severi data of a surface.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurfaceModel {
    pub name: String,
    pub rank: usize,
    pub gram: Matrix,
    pub canonical: DivClass,
    pub ample_ref: DivClass,
    /// Known irreducible curves; entries with negative self-intersection are
    /// the negative-curve catalog that drives nefness and Zariski support.
    pub curves: Vec<CurveEntry>,
    /// Asserts the negative entries of `curves` list every irreducible
    /// negative class on the surface.
    pub catalog_complete: bool,
    #[serde(skip)]
    pub basis: Vec<String>,
}

impl SurfaceModel {
    /// Validates and builds a model. Checks: square symmetric Gram of
    /// signature `(1, rank-1)` (characteristic-polynomial sign test, exact),
    /// coordinate lengths, `ample_ref^2 > 0`, `ample_ref . C > 0` and
    /// `C . C = self_int` for every catalog entry.
    pub fn new(
        name: impl Into<String>,
        basis: Vec<String>,
        gram: Matrix,
        canonical: DivClass,
        ample_ref: DivClass,
        curves: Vec<(String, DivClass, Option<u32>)>,
        catalog_complete: bool,
    ) -> Result<Self> {
        let rank = gram.len();
        if rank == 0 {
            return Err(Error::Input("empty lattice".into()));
        }
        if !linalg::is_symmetric(&gram) {
            return Err(Error::Input("gram matrix must be symmetric".into()));
        }
        if basis.len() != rank || canonical.len() != rank || ample_ref.len() != rank {
            return Err(Error::Input("coordinate length must equal the rank".into()));
        }
        let inertia = linalg::symmetric_inertia(&gram);
        if inertia != (1, 0, rank - 1) {
            return Err(Error::Model(format!(
                "gram signature must be (1, {}), found (+{}, 0x{}, -{})",
                rank - 1,
                inertia.0,
                inertia.1,
                inertia.2
            )));
        }
        let mut model = SurfaceModel {
            name: name.into(),
            rank,
            gram,
            canonical,
            ample_ref,
            curves: Vec::new(),
            catalog_complete,
            basis,
        };
        if !model.pair(&model.ample_ref, &model.ample_ref).is_positive() {
            return Err(Error::Input("ample_ref must have positive square".into()));
        }
        for (cname, cls, genus) in curves {
            if cls.len() != rank {
                return Err(Error::Input(format!(
                    "curve {cname}: coordinate length must equal the rank"
                )));
            }
            if !model.pair(&model.ample_ref, &cls).is_positive() {
                return Err(Error::Input(format!(
                    "curve {cname} fails ample positivity against ample_ref"
                )));
            }
            let self_int = model.pair(&cls, &cls);
            model.curves.push(CurveEntry {
                name: cname,
                cls,
                self_int,
                arith_genus: genus,
            });
        }
        Ok(model)
    }

    /// Intersection product `D1 . D2 = D1^T gram D2`.
    pub fn pair(&self, d1: &DivClass, d2: &DivClass) -> Rat {
        debug_assert_eq!(d1.len(), self.rank);
        debug_assert_eq!(d2.len(), self.rank);
        let gv = linalg::mat_vec(&self.gram, &d2.0);
        d1.0.iter().zip(&gv).map(|(a, b)| a * b).sum()
    }

    pub fn self_int(&self, d: &DivClass) -> Rat {
        self.pair(d, d)
    }

    pub fn negative_curves(&self) -> impl Iterator<Item = &CurveEntry> {
        self.curves.iter().filter(|c| c.self_int.is_negative())
    }

    pub fn curve_by_name(&self, name: &str) -> Option<&CurveEntry> {
        self.curves.iter().find(|c| c.name == name)
    }

    fn check_len(&self, d: &DivClass) -> Result<()> {
        if d.len() != self.rank {
            return Err(Error::Input(format!(
                "class has {} coordinates, lattice rank is {}",
                d.len(),
                self.rank
            )));
        }
        Ok(())
    }
}

/// Symmetric bilinear intersection product with dimension validation.
pub fn pairing(d1: &DivClass, d2: &DivClass, s: &SurfaceModel) -> Result<Rat> {
    s.check_len(d1)?;
    s.check_len(d2)?;
    Ok(s.pair(d1, d2))
}

/// A modeled point blowup: the base surface, the blown-up surface, the
/// exceptional class and the log discrepancy `A(E)` (2 for the ordinary
/// blowup of a smooth surface point).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointModel {
    pub base: SurfaceModel,
    pub blown: SurfaceModel,
    pub exceptional: DivClass,
    pub log_discrepancy: Rat,
}

impl PointModel {
    /// Total transform of a base class: same coordinates, zero along `E`.
    pub fn pullback(&self, d: &DivClass) -> Result<DivClass> {
        self.base.check_len(d)?;
        let mut coords = d.0.clone();
        coords.push(Rat::zero());
        Ok(DivClass(coords))
    }

    /// Multiplicity at the blown-up point of a cataloged base curve, read
    /// off from its strict transform `pi* C - m E` in the blown catalog.
    pub fn catalog_multiplicity(&self, base_cls: &DivClass) -> Option<Rat> {
        self.blown.curves.iter().find_map(|entry| {
            let (head, tail) = entry.cls.0.split_at(self.base.rank);
            if head == base_cls.0.as_slice() && tail[0].is_negative() {
                Some(-tail[0].clone())
            } else {
                None
            }
        })
    }
}

// ---------------------------------------------------------------------------
// Built-in surfaces
// ---------------------------------------------------------------------------

/// Built-in classical surfaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BuiltinSpec {
    P2,
    P1xP1,
    Hirzebruch(u32),
    DelPezzo(u32),
    BlowupP2(u32),
}

impl std::str::FromStr for BuiltinSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("P2") {
            return Ok(BuiltinSpec::P2);
        }
        if s.eq_ignore_ascii_case("P1xP1") {
            return Ok(BuiltinSpec::P1xP1);
        }
        let parse_param = |body: &str, prefix: &str| -> Result<u32> {
            body.strip_prefix(prefix)
                .and_then(|rest| rest.strip_prefix('('))
                .and_then(|rest| rest.strip_suffix(')'))
                .and_then(|inner| inner.trim().parse().ok())
                .ok_or_else(|| Error::Input(format!("unknown builtin surface `{s}`")))
        };
        if s.starts_with("Hirzebruch") {
            return Ok(BuiltinSpec::Hirzebruch(parse_param(s, "Hirzebruch")?));
        }
        if s.starts_with("DelPezzo") {
            return Ok(BuiltinSpec::DelPezzo(parse_param(s, "DelPezzo")?));
        }
        if s.starts_with("BlowupP2") {
            return Ok(BuiltinSpec::BlowupP2(parse_param(s, "BlowupP2")?));
        }
        Err(Error::Input(format!("unknown builtin surface `{s}`")))
    }
}

fn diag_gram(signs: &[i64]) -> Matrix {
    let n = signs.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Rat::int(signs[i])
                    } else {
                        Rat::zero()
                    }
                })
                .collect()
        })
        .collect()
}

fn blowup_p2_model(name: String, k: usize) -> Result<SurfaceModel> {
    let mut signs = vec![1i64];
    signs.extend(std::iter::repeat_n(-1, k));
    let gram = diag_gram(&signs);
    let mut basis = vec!["H".to_string()];
    basis.extend((1..=k).map(|i| format!("E{i}")));
    let mut kc = vec![Rat::int(-3)];
    kc.extend(std::iter::repeat_n(Rat::one(), k));
    let canonical = DivClass(kc);
    let ample = canonical.neg();
    let classes = enumerate_negative_classes_raw(&gram, &canonical, &ample, -2)?;
    let curves = classes
        .into_iter()
        .map(|cls| (cls.format(&basis), cls, Some(0)))
        .collect();
    SurfaceModel::new(name, basis, gram, canonical, ample, curves, true)
}

/// Returns a validated built-in surface with a complete negative-curve
/// catalog. Del Pezzo catalogs are produced by exact bounded enumeration.
pub fn builtin_surface(spec: &BuiltinSpec) -> Result<SurfaceModel> {
    match spec {
        BuiltinSpec::P2 => SurfaceModel::new(
            "P2",
            vec!["H".into()],
            vec![vec![Rat::one()]],
            DivClass::from_ints(&[-3]),
            DivClass::from_ints(&[1]),
            vec![("H".into(), DivClass::from_ints(&[1]), Some(0))],
            true,
        ),
        BuiltinSpec::P1xP1 => SurfaceModel::new(
            "P1xP1",
            vec!["f1".into(), "f2".into()],
            vec![vec![Rat::zero(), Rat::one()], vec![Rat::one(), Rat::zero()]],
            DivClass::from_ints(&[-2, -2]),
            DivClass::from_ints(&[1, 1]),
            vec![
                ("f1".into(), DivClass::from_ints(&[1, 0]), Some(0)),
                ("f2".into(), DivClass::from_ints(&[0, 1]), Some(0)),
            ],
            true,
        ),
        BuiltinSpec::Hirzebruch(n) => {
            let n = *n as i64;
            let gram = vec![
                vec![Rat::zero(), Rat::one()],
                vec![Rat::one(), Rat::int(-n)],
            ];
            let canonical = DivClass(vec![Rat::int(-(n + 2)), Rat::int(-2)]);
            let ample = DivClass(vec![Rat::int(n + 1), Rat::one()]);
            let mut curves = vec![("f".to_string(), DivClass::from_ints(&[1, 0]), Some(0))];
            curves.push(("s".to_string(), DivClass::from_ints(&[0, 1]), Some(0)));
            SurfaceModel::new(
                format!("Hirzebruch({n})"),
                vec!["f".into(), "s".into()],
                gram,
                canonical,
                ample,
                curves,
                true,
            )
        }
        BuiltinSpec::DelPezzo(d) => match d {
            1..=8 => {
                let mut m = blowup_p2_model(format!("DelPezzo({d})"), (9 - d) as usize)?;
                m.name = format!("DelPezzo({d})");
                Ok(m)
            }
            9 => {
                let mut m = builtin_surface(&BuiltinSpec::P2)?;
                m.name = "DelPezzo(9)".into();
                Ok(m)
            }
            _ => Err(Error::Input(format!(
                "del Pezzo degree must be 1..=9, got {d}"
            ))),
        },
        BuiltinSpec::BlowupP2(k) => match k {
            0 => builtin_surface(&BuiltinSpec::P2),
            1..=8 => blowup_p2_model(format!("BlowupP2({k})"), *k as usize),
            _ => Err(Error::Input(format!(
                "blowup of P2 at {k} general points has an infinite negative-curve catalog"
            ))),
        },
    }
}

// ---------------------------------------------------------------------------
// Negative-class enumeration
// ---------------------------------------------------------------------------

/// Smallest integer `n >= 0` with `n^2 >= r` (for `r >= 0`).
fn over_sqrt(r: &Rat) -> BigInt {
    if !r.is_positive() {
        return BigInt::zero();
    }
    let mut n = r.ceil_int().sqrt();
    while Rat::from(&n * &n) < *r {
        n += 1;
    }
    n
}

/// Complete list of integral classes `C` with
/// `self_int_min <= C^2 <= -1`, arithmetic genus zero
/// (`C^2 + C.K = -2`, the adjunction constraint satisfied by every
/// irreducible negative class on the built-in models) and `C . ample > 0`,
/// found by exact bounded search. The coefficient box comes from the
/// Hodge-index/Cauchy–Schwarz inequality against the ample class; a search
/// is rejected as unbounded when `K^2 <= 0`.
pub fn enumerate_negative_classes(s: &SurfaceModel, self_int_min: i64) -> Result<Vec<DivClass>> {
    enumerate_negative_classes_raw(&s.gram, &s.canonical, &s.ample_ref, self_int_min)
}

pub(crate) fn enumerate_negative_classes_raw(
    gram: &Matrix,
    canonical: &DivClass,
    ample: &DivClass,
    self_int_min: i64,
) -> Result<Vec<DivClass>> {
    if self_int_min >= 0 {
        return Err(Error::Input("self_int_min must be negative".into()));
    }
    let rank = gram.len();
    if linalg::symmetric_inertia(gram) != (1, 0, rank - 1) {
        return Err(Error::Model(
            "enumeration requires signature (1, rank-1)".into(),
        ));
    }
    let pair = |a: &[Rat], b: &[Rat]| -> Rat {
        let gv = linalg::mat_vec(gram, b);
        a.iter().zip(&gv).map(|(x, y)| x * y).sum()
    };
    let q = pair(&ample.0, &ample.0); // A^2 > 0
    let k2 = pair(&canonical.0, &canonical.0);
    let ka = pair(&canonical.0, &ample.0);
    if !k2.is_positive() {
        return Err(Error::Model(
            "unbounded search region: K^2 <= 0 gives no coefficient box".into(),
        ));
    }

    // For C with C^2 = sigma, C.K = -2-sigma, Cauchy-Schwarz on the
    // A-orthogonal (negative definite) components bounds c = C.A by
    //   K^2 c^2 - 2 (K.A)(C.K) c + (A^2 (C.K)^2 + sigma (K.A)^2 - sigma A^2 K^2) <= 0.
    let mut c_max = Rat::zero();
    let mut any = false;
    for sigma in self_int_min..=-1 {
        let ck = Rat::int(-2 - sigma);
        let s = Rat::int(sigma);
        let b = Rat::int(-2) * &ka * &ck;
        let c0 = &q * &(&ck * &ck) + &s * &(&ka * &ka) - &(&s * &q) * &k2;
        let disc = &b * &b - Rat::int(4) * &k2 * &c0;
        if disc.is_negative() {
            continue;
        }
        let root_hi = (-&b + Rat::from(over_sqrt(&disc))) / (Rat::int(2) * &k2);
        if root_hi.is_positive() {
            any = true;
            c_max = c_max.max(root_hi);
        }
    }
    if !any {
        return Ok(Vec::new());
    }

    // Positive definite majorant phi(x) = 2 (x.A)^2 / A^2 - x^2; every
    // admissible class satisfies phi <= R.
    let r_bound = Rat::int(2) * &c_max * &c_max / &q - Rat::int(self_int_min);
    let v = linalg::mat_vec(gram, &ample.0);
    let phi: Matrix = (0..rank)
        .map(|i| {
            (0..rank)
                .map(|j| Rat::int(2) * &v[i] * &v[j] / &q - &gram[i][j])
                .collect()
        })
        .collect();
    let (l, d) = linalg::ldl(&phi)?;

    let mut found = Vec::new();
    let mut x = vec![BigInt::zero(); rank];
    enumerate_rec(
        &l,
        &d,
        &r_bound,
        rank,
        &mut x,
        &mut |coords: &[BigInt]| {
            if coords.iter().all(Zero::is_zero) {
                return;
            }
            let cr: Vec<Rat> = coords.iter().map(|z| Rat::from(z.clone())).collect();
            let sq = pair(&cr, &cr);
            if sq < Rat::int(self_int_min) || !sq.is_negative() {
                return;
            }
            if pair(&cr, &canonical.0) != Rat::int(-2) - &sq {
                return;
            }
            if !pair(&cr, &ample.0).is_positive() {
                return;
            }
            found.push(DivClass(cr));
        },
    );
    found.sort_by(|a, b| a.0.cmp(&b.0));
    found.dedup();
    Ok(found)
}

/// Fincke–Pohst style recursion over integer points of `phi(x) <= bound`,
/// with `phi = L D L^T`. Coordinates are fixed from the last index down.
fn enumerate_rec(
    l: &Matrix,
    d: &[Rat],
    bound: &Rat,
    level: usize,
    x: &mut Vec<BigInt>,
    visit: &mut impl FnMut(&[BigInt]),
) {
    if level == 0 {
        visit(x);
        return;
    }
    let i = level - 1;
    // y_i = x_i + sum_{j>i} L[j][i] x_j; remaining budget excludes levels > i.
    let c_i: Rat = (i + 1..x.len())
        .map(|j| &l[j][i] * &Rat::from(x[j].clone()))
        .sum();
    let b = bound / &d[i];
    if b.is_negative() {
        return;
    }
    let s = over_sqrt(&b);
    let lo = (-&c_i - Rat::from(s.clone())).ceil_int();
    let hi = (-&c_i + Rat::from(s)).floor_int();
    let mut xi = lo;
    while xi <= hi {
        let y = Rat::from(xi.clone()) + &c_i;
        let used = &d[i] * &(&y * &y);
        if used <= *bound {
            x[i] = xi.clone();
            let remaining = bound - &used;
            enumerate_rec(l, d, &remaining, i, x, visit);
        }
        xi += 1;
    }
    x[i] = BigInt::zero();
}

// ---------------------------------------------------------------------------
// Blowups
// ---------------------------------------------------------------------------

/// Strict transform supplied explicitly for a user-specified point:
/// the blown class `pi* C - m E` (length `rank+1`) with its stated
/// multiplicity `m`.
#[derive(Clone, Debug)]
pub struct ExplicitTransform {
    pub name: String,
    pub cls: DivClass,
    pub mult: Rat,
}

/// How the blown-up point is specified.
#[derive(Clone, Debug)]
pub enum PointSpec {
    /// A general point; the blown catalog is re-enumerated. Supported when
    /// the blowup is again a surface with finite catalog (`K^2 >= 2` and
    /// ample anticanonical class on the base).
    General,
    /// Explicit strict-transform data; `catalog_complete` is the caller's
    /// claim about the blown surface.
    Explicit {
        transforms: Vec<ExplicitTransform>,
        catalog_complete: bool,
    },
}

/// Blows up a modeled point. The blown lattice appends an orthogonal `(-1)`
/// vector `E`, the canonical class becomes `pi* K + E` (smooth point) and
/// the log discrepancy is 2.
pub fn blow_up(s: &SurfaceModel, spec: &PointSpec) -> Result<PointModel> {
    let rank = s.rank;
    let mut gram: Matrix = s
        .gram
        .iter()
        .map(|row| {
            let mut r = row.clone();
            r.push(Rat::zero());
            r
        })
        .collect();
    let mut last = vec![Rat::zero(); rank + 1];
    last[rank] = Rat::int(-1);
    gram.push(last);

    let mut basis = s.basis.clone();
    basis.push("E".into());
    let mut kc = s.canonical.0.clone();
    kc.push(Rat::one());
    let canonical = DivClass(kc);
    let mut exc = vec![Rat::zero(); rank + 1];
    exc[rank] = Rat::one();
    let exceptional = DivClass(exc);

    let (curves, ample, complete) = match spec {
        PointSpec::General => {
            let minus_k = s.canonical.neg();
            let anticanonical_ample = s.pair(&minus_k, &minus_k).is_positive()
                && s.curves
                    .iter()
                    .all(|c| s.pair(&minus_k, &c.cls).is_positive());
            if !s.catalog_complete || !anticanonical_ample {
                return Err(Error::Input(
                    "general blowup with re-enumeration needs a complete catalog and ample -K on the base"
                        .into(),
                ));
            }
            let mut bk = minus_k.0.clone();
            bk.push(Rat::int(-1));
            let blown_anti = DivClass(bk); // -K of the blowup
            let classes = enumerate_negative_classes_raw(&gram, &canonical, &blown_anti, -2)
                .map_err(|e| match e {
                    Error::Model(m) => Error::Model(format!(
                        "general blowup of {} has no finite catalog: {m}",
                        s.name
                    )),
                    other => other,
                })?;
            let entries = classes
                .into_iter()
                .map(|cls| (cls.format(&basis), cls, Some(0)))
                .collect();
            (entries, blown_anti, true)
        }
        PointSpec::Explicit {
            transforms,
            catalog_complete,
        } => {
            let pair_blown = |a: &DivClass, b: &DivClass| -> Rat {
                let gv = linalg::mat_vec(&gram, &b.0);
                a.0.iter().zip(&gv).map(|(x, y)| x * y).sum()
            };
            let mut entries = vec![("E".to_string(), exceptional.clone(), Some(0))];
            for t in transforms {
                if t.cls.len() != rank + 1 {
                    return Err(Error::Input(format!(
                        "strict transform {} must have {} coordinates",
                        t.name,
                        rank + 1
                    )));
                }
                let m = pair_blown(&t.cls, &exceptional);
                if m != t.mult {
                    return Err(Error::Input(format!(
                        "strict transform {}: (C - mE).E = {} but stated multiplicity is {}",
                        t.name, m, t.mult
                    )));
                }
                // Only negative classes belong in catalogs.
                if pair_blown(&t.cls, &t.cls).is_negative() {
                    entries.push((t.name.clone(), t.cls.clone(), None));
                }
            }
            // m pi*A - E is positive against E and every kept transform once
            // m clears all multiplicity/degree ratios.
            let mut m = BigInt::from(1);
            let a_up = {
                let mut v = s.ample_ref.0.clone();
                v.push(Rat::zero());
                DivClass(v)
            };
            loop {
                let cand = a_up.scale(&Rat::from(m.clone())).sub(&exceptional);
                let sq = pair_blown(&cand, &cand);
                let ok = sq.is_positive()
                    && entries
                        .iter()
                        .all(|(_, cls, _)| pair_blown(&cand, cls).is_positive());
                if ok {
                    break (entries, cand, *catalog_complete && s.catalog_complete);
                }
                m += 1;
                if m > BigInt::from(1_000_000) {
                    return Err(Error::Internal(
                        "failed to construct an ample reference on the blowup".into(),
                    ));
                }
            }
        }
    };

    let blown = SurfaceModel::new(
        format!("{}^(blowup)", s.name),
        basis,
        gram,
        canonical,
        ample,
        curves,
        complete,
    )?;
    Ok(PointModel {
        base: s.clone(),
        blown,
        exceptional,
        log_discrepancy: Rat::int(2),
    })
}

// ---------------------------------------------------------------------------
// Surface file schema
// ---------------------------------------------------------------------------

/// JSON-compatible surface file. Rationals are `"p/q"` strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurfaceFile {
    pub name: String,
    pub rank: usize,
    pub gram: Vec<Vec<Rat>>,
    pub canonical: Vec<Rat>,
    pub ample_ref: Vec<Rat>,
    pub curves: Vec<CurveFileEntry>,
    pub catalog_complete: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveFileEntry {
    pub name: String,
    pub class: Vec<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<u32>,
}

impl SurfaceFile {
    pub fn from_model(m: &SurfaceModel) -> Self {
        SurfaceFile {
            name: m.name.clone(),
            rank: m.rank,
            gram: m.gram.clone(),
            canonical: m.canonical.0.clone(),
            ample_ref: m.ample_ref.0.clone(),
            curves: m
                .curves
                .iter()
                .map(|c| CurveFileEntry {
                    name: c.name.clone(),
                    class: c.cls.0.clone(),
                    genus: c.arith_genus,
                })
                .collect(),
            catalog_complete: m.catalog_complete,
        }
    }

    pub fn into_model(self) -> Result<SurfaceModel> {
        if self.rank != self.gram.len() {
            return Err(Error::Input(format!(
                "declared rank {} does not match gram size {}",
                self.rank,
                self.gram.len()
            )));
        }
        let basis = (0..self.rank).map(|i| format!("e{i}")).collect();
        SurfaceModel::new(
            self.name,
            basis,
            self.gram,
            DivClass(self.canonical),
            DivClass(self.ample_ref),
            self.curves
                .into_iter()
                .map(|c| (c.name, DivClass(c.class), c.genus))
                .collect(),
            self.catalog_complete,
        )
    }

    pub fn parse(json: &str) -> Result<SurfaceModel> {
        let file: SurfaceFile =
            serde_json::from_str(json).map_err(|e| Error::Input(format!("surface file: {e}")))?;
        file.into_model()
    }
}

/// Loads a surface from `builtin:<name>` or a JSON file path.
pub fn load_surface(source: &str) -> Result<SurfaceModel> {
    if let Some(name) = source.strip_prefix("builtin:") {
        let spec: BuiltinSpec = name.parse()?;
        return builtin_surface(&spec);
    }
    let text = std::fs::read_to_string(source)
        .map_err(|e| Error::Input(format!("cannot read {source}: {e}")))?;
    SurfaceFile::parse(&text)
}
