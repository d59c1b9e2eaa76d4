//! Exact invariants along a ray `L - tE`: the piecewise-quadratic volume
//! profile `t -> (P(L - tE))^2`, the piecewise-linear restricted profile
//! `g(t) = P(L - tE) . E`, the thresholds `epsilon = eta` and `tau = T`, the
//! `S`-invariant (two independent formulas that must agree exactly), the
//! fixed-part degree of the blowup refinement, and closed-form profile
//! matchers.
//!
//! Breakpoints are discovered by an event-driven sweep: inside a chamber the
//! Zariski support is constant, the negative-part coefficients are affine in
//! `t` and the chamber ends at the exact rational parameter where a wall
//! activates or the volume collapses. All integrals are antiderivatives of
//! the per-segment polynomials.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::ns_lattice::{DivClass, PointModel, SurfaceModel};
use crate::poly::{PiecewisePoly, Poly};
use crate::rat::Rat;
use crate::zariski::{dot, try_decompose_cached, PairingCache};

/// Threshold and profile data for one exceptional ray, with the log
/// discrepancy of the ray divisor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RayInvariants {
    pub eps: Rat,
    pub eta: Rat,
    pub tau: Rat,
    pub s_inv: Rat,
    pub fixed_deg: Rat,
    pub vol_profile: PiecewisePoly,
    pub restricted_profile: PiecewisePoly,
    pub log_discrepancy: Rat,
}

/// Ample test against a complete catalog: positive square, positive degree
/// against the reference ample class and strict positivity on every catalog
/// curve.
pub fn is_ample(d: &DivClass, s: &SurfaceModel) -> Result<bool> {
    if d.len() != s.rank {
        return Err(Error::Input("dimension mismatch".into()));
    }
    Ok(s.self_int(d).is_positive()
        && s.pair(d, &s.ample_ref).is_positive()
        && s.curves.iter().all(|c| s.pair(d, &c.cls).is_positive()))
}

struct Chamber {
    hi: Rat,
    support: Vec<String>,
    vol: Poly,
    g: Poly,
}

/// A fully swept ray on an ambient surface.
pub struct RayScan {
    ambient: SurfaceModel,
    l_up: DivClass,
    l_sq: Rat,
    log_disc: Rat,
    exceptional: bool,
    chambers: Vec<Chamber>,
}

impl RayScan {
    /// Ray `pi*L - tE` over a modeled point blowup; `l` is given on the base
    /// and must be ample there.
    pub fn over_point(pm: &PointModel, l: &DivClass) -> Result<RayScan> {
        if !is_ample(l, &pm.base)? {
            return Err(Error::Domain(format!(
                "{} is not ample on {}",
                l.format(&pm.base.basis),
                pm.base.name
            )));
        }
        let l_up = pm.pullback(l)?;
        let chambers = sweep(&pm.blown, &l_up, &pm.exceptional)?;
        Ok(RayScan {
            ambient: pm.blown.clone(),
            l_sq: pm.blown.self_int(&l_up),
            l_up,
            log_disc: pm.log_discrepancy.clone(),
            exceptional: true,
            chambers,
        })
    }

    /// Ray `L - tC` along a cataloged curve (or any effective class) on the
    /// surface itself; the log discrepancy of a prime divisor on the surface
    /// is 1. Degenerate directions with `C^2 >= 0` are allowed.
    pub fn along_curve(s: &SurfaceModel, l: &DivClass, curve: &DivClass) -> Result<RayScan> {
        if !is_ample(l, s)? {
            return Err(Error::Domain(format!(
                "{} is not ample on {}",
                l.format(&s.basis),
                s.name
            )));
        }
        let chambers = sweep(s, l, curve)?;
        Ok(RayScan {
            ambient: s.clone(),
            l_sq: s.self_int(l),
            l_up: l.clone(),
            log_disc: Rat::one(),
            exceptional: false,
            chambers,
        })
    }

    pub fn ambient(&self) -> &SurfaceModel {
        &self.ambient
    }

    pub fn class_at_zero(&self) -> &DivClass {
        &self.l_up
    }

    pub fn l_square(&self) -> &Rat {
        &self.l_sq
    }

    pub fn log_discrepancy(&self) -> &Rat {
        &self.log_disc
    }

    /// Nef threshold: the ray is nef exactly on `[0, eps]`.
    pub fn eps(&self) -> Result<Rat> {
        let first = &self.chambers[0];
        if !first.support.is_empty() {
            return Err(Error::Internal(
                "ray starts outside the nef cone despite ample validation".into(),
            ));
        }
        Ok(first.hi.clone())
    }

    /// Movable threshold; equals the nef threshold on a surface.
    pub fn eta(&self) -> Result<Rat> {
        self.eps()
    }

    /// Pseudo-effective threshold: the volume vanishes at `tau` and the ray
    /// leaves the pseudo-effective cone there.
    pub fn tau(&self) -> Rat {
        self.chambers.last().expect("nonempty sweep").hi.clone()
    }

    /// `t -> vol(L - tE)` on `[0, tau]`, piecewise quadratic.
    pub fn vol_profile(&self) -> Result<PiecewisePoly> {
        self.profile(|c| c.vol.clone())
    }

    /// `t -> P(L - tE) . E` on `[0, tau]`, piecewise linear.
    pub fn restricted_profile(&self) -> Result<PiecewisePoly> {
        self.profile(|c| c.g.clone())
    }

    fn profile(&self, pick: impl Fn(&Chamber) -> Poly) -> Result<PiecewisePoly> {
        let mut breakpoints = vec![Rat::zero()];
        let mut segments = Vec::new();
        for c in &self.chambers {
            breakpoints.push(c.hi.clone());
            segments.push(pick(c));
        }
        PiecewisePoly::new(breakpoints, segments)
    }

    /// `(eps, eta, tau)`.
    pub fn thresholds(&self) -> Result<(Rat, Rat, Rat)> {
        Ok((self.eps()?, self.eta()?, self.tau()))
    }

    /// `S(L;E)` computed both as `(1/L^2) int vol` and as
    /// `(2/L^2) int x g(x) dx`; the two must agree exactly.
    pub fn s_invariant(&self) -> Result<Rat> {
        let vol = self.vol_profile()?;
        let g = self.restricted_profile()?;
        let s1 = vol.integral() / &self.l_sq;
        let s2 = Rat::int(2) * g.integral_t() / &self.l_sq;
        if s1 != s2 {
            return Err(Error::Internal(format!(
                "S-invariant formulas disagree: {s1} vs {s2}"
            )));
        }
        Ok(s1)
    }

    /// Fixed-part degree of the blowup refinement:
    /// `(2/L^2) int (x - g(x)) g(x) dx`. Only defined for exceptional rays.
    pub fn fixed_part_degree(&self) -> Result<Rat> {
        if !self.exceptional {
            return Err(Error::Domain(
                "fixed-part degree requires the exceptional ray of a point blowup".into(),
            ));
        }
        let g = self.restricted_profile()?;
        let x_minus_g = |seg: &Poly| Poly::linear(Rat::zero(), Rat::one()).sub(seg).mul(seg);
        Ok(Rat::int(2) * g.map_integral(x_minus_g) / &self.l_sq)
    }

    /// Full invariant record with every structural identity re-verified:
    /// continuity, nonnegativity and monotonicity of the volume, concavity
    /// of `g`, `g(t) = t` up to the nef threshold, the segment-wise
    /// derivative identity `vol' = -2 g`, the exact square comparisons
    /// `eps^2 <= L^2 <= tau^2` and `S <= (2/3) tau`.
    pub fn invariants(&self) -> Result<RayInvariants> {
        if !self.exceptional {
            return Err(Error::Domain(
                "ray invariants are assembled over a point blowup".into(),
            ));
        }
        let (eps, eta, tau) = self.thresholds()?;
        let vol = self.vol_profile()?;
        let g = self.restricted_profile()?;
        self.check_profiles(&eps, &vol, &g)?;
        let s_inv = self.s_invariant()?;
        let fixed_deg = self.fixed_part_degree()?;

        if !eps.is_positive() {
            return Err(Error::Internal("nef threshold must be positive".into()));
        }
        if &eps * &eps > self.l_sq || self.l_sq > &tau * &tau {
            return Err(Error::Internal(
                "threshold chain eps <= sqrt(L^2) <= tau violated".into(),
            ));
        }
        if !s_inv.is_positive() || Rat::int(3) * &s_inv > Rat::int(2) * &tau {
            return Err(Error::Internal("S outside (0, (2/3) tau]".into()));
        }
        Ok(RayInvariants {
            eps,
            eta,
            tau,
            s_inv,
            fixed_deg,
            vol_profile: vol,
            restricted_profile: g,
            log_discrepancy: self.log_disc.clone(),
        })
    }

    fn check_profiles(&self, eps: &Rat, vol: &PiecewisePoly, g: &PiecewisePoly) -> Result<()> {
        if !vol.is_continuous() || !g.is_continuous() {
            return Err(Error::Internal("profiles must be continuous".into()));
        }
        if !vol.nonneg_deg2()? || !vol.non_increasing_deg2()? {
            return Err(Error::Internal(
                "volume profile must be nonnegative and non-increasing".into(),
            ));
        }
        if !vol.eval(vol.domain_end())?.is_zero() {
            return Err(Error::Internal("volume must vanish at tau".into()));
        }
        // vol' = -2 g segment by segment
        for (v, gg) in vol.segments.iter().zip(&g.segments) {
            if !v.derivative().add(&gg.scale(&Rat::int(2))).is_zero() {
                return Err(Error::Internal(
                    "derivative identity vol' = -2g failed".into(),
                ));
            }
        }
        // g concave: segment slopes non-increasing
        let slopes: Vec<Rat> = g.segments.iter().map(|seg| seg.coeff(1)).collect();
        if slopes.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Internal("restricted profile must be concave".into()));
        }
        // g(t) = t on [0, eps] for the exceptional ray
        if self.exceptional {
            let ident = Poly::linear(Rat::zero(), Rat::one());
            for (i, seg) in g.segments.iter().enumerate() {
                if &g.breakpoints[i + 1] <= eps && !seg.sub(&ident).is_zero() {
                    return Err(Error::Internal(
                        "restricted profile must equal t on the nef range".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Streams `t, vol(t), g(t)` at the given rational step, each value as
    /// `"p/q"` plus a decimal rendering.
    pub fn write_csv<W: Write>(&self, step: &Rat, out: &mut W) -> Result<()> {
        if !step.is_positive() {
            return Err(Error::Input("step must be positive".into()));
        }
        let vol = self.vol_profile()?;
        let g = self.restricted_profile()?;
        let tau = self.tau();
        let mut emit = |line: String| -> Result<()> {
            writeln!(out, "{line}").map_err(|e| Error::Input(format!("write failed: {e}")))
        };
        emit("t,vol,g,t_dec,vol_dec,g_dec".into())?;
        let mut t = Rat::zero();
        loop {
            let at = if t > tau { tau.clone() } else { t.clone() };
            let v = vol.eval(&at)?;
            let gg = g.eval(&at)?;
            emit(format!(
                "{},{},{},{:.6},{:.6},{:.6}",
                at,
                v,
                gg,
                at.to_f64(),
                v.to_f64(),
                gg.to_f64()
            ))?;
            if at == tau {
                break;
            }
            t = t + step;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Free functions on an ambient surface
// ---------------------------------------------------------------------------

/// Volume profile of `l - t e` on the ambient surface. `l` must be nef and
/// big there (the pullback of an ample class qualifies).
pub fn volume_ray(l: &DivClass, e: &DivClass, s: &SurfaceModel) -> Result<PiecewisePoly> {
    scan_raw(s, l, e)?.vol_profile()
}

/// Restricted profile `g(t) = P(l - t e) . e`.
pub fn restricted_volume_ray(
    l: &DivClass,
    e: &DivClass,
    s: &SurfaceModel,
) -> Result<PiecewisePoly> {
    scan_raw(s, l, e)?.restricted_profile()
}

/// `(eps, eta, tau)` along `l - t e`.
pub fn thresholds(l: &DivClass, e: &DivClass, s: &SurfaceModel) -> Result<(Rat, Rat, Rat)> {
    scan_raw(s, l, e)?.thresholds()
}

/// `S(l; e)` via the two exact formulas.
pub fn s_invariant(l: &DivClass, e: &DivClass, s: &SurfaceModel) -> Result<Rat> {
    scan_raw(s, l, e)?.s_invariant()
}

/// Fixed-part degree over a modeled point blowup, `l` ample on the base.
pub fn fixed_part_degree(pm: &PointModel, l: &DivClass) -> Result<Rat> {
    RayScan::over_point(pm, l)?.fixed_part_degree()
}

fn scan_raw(s: &SurfaceModel, l: &DivClass, e: &DivClass) -> Result<RayScan> {
    let chambers = sweep(s, l, e)?;
    Ok(RayScan {
        ambient: s.clone(),
        l_sq: s.self_int(l),
        l_up: l.clone(),
        log_disc: Rat::one(),
        exceptional: false,
        chambers,
    })
}

// ---------------------------------------------------------------------------
// The sweep
// ---------------------------------------------------------------------------

struct SweepCtx<'a> {
    s: &'a SurfaceModel,
    cache: PairingCache<'a>,
    l_up: &'a DivClass,
    e: &'a DivClass,
    e_gv: Vec<Rat>,
}

/// Symbolic chamber data for one support set: the negative-part coefficients
/// and the positive part are affine in `t`, valid on `[t0, hi]` where every
/// wall stays nonnegative, with the walls binding at `hi` recorded for the
/// support transition.
struct ChamberSym {
    support: Vec<usize>,
    p_const: DivClass,
    p_slope: DivClass,
    hi: Rat,
    drop_at_hi: Vec<usize>,
    add_at_hi: Vec<usize>,
    ends_pseudoeffective: bool,
}

fn sweep(s: &SurfaceModel, l_up: &DivClass, e: &DivClass) -> Result<Vec<Chamber>> {
    if e.len() != s.rank || l_up.len() != s.rank {
        return Err(Error::Input("dimension mismatch".into()));
    }
    if e.is_zero() {
        return Err(Error::Domain("ray direction must be nonzero".into()));
    }
    if !crate::zariski::is_nef(l_up, s)? || !s.self_int(l_up).is_positive() {
        return Err(Error::Domain(format!(
            "{} is not nef and big on {}",
            l_up.format(&s.basis),
            s.name
        )));
    }
    if !s.pair(e, &s.ample_ref).is_positive() {
        return Err(Error::Domain(
            "ray direction must have positive degree against the reference ample class".into(),
        ));
    }

    let ctx = SweepCtx {
        s,
        cache: PairingCache::new(s),
        l_up,
        e,
        e_gv: linalg::mat_vec(&s.gram, &e.0),
    };

    let mut chambers: Vec<Chamber> = Vec::new();
    let mut cur = Rat::zero();
    let mut next_support: Vec<usize> = Vec::new();
    let mut last_width = Rat::one();

    for _ in 0..10_000 {
        // The predicted support usually validates directly; fall back to
        // probing when a transition is degenerate.
        let sym = match chamber_from_support(&ctx, next_support.clone(), &cur)? {
            Some(sym) => sym,
            None => probe_support(&ctx, &cur, &last_width)?,
        };
        let vol = vol_poly(&ctx, &sym);
        let g = g_poly(&ctx, &sym);
        let names = sym
            .support
            .iter()
            .map(|&i| ctx.cache.catalog[i].name.clone())
            .collect();
        if let Some(root) = first_root_in(&vol, &cur, &sym.hi)? {
            chambers.push(Chamber {
                hi: root,
                support: names,
                vol,
                g,
            });
            return Ok(chambers);
        }
        if sym.ends_pseudoeffective {
            return Err(Error::Internal(
                "pseudo-effectivity ends without the volume reaching zero".into(),
            ));
        }
        last_width = &sym.hi - &cur;
        cur = sym.hi.clone();
        next_support = sym
            .support
            .iter()
            .enumerate()
            .filter(|(k, _)| !sym.drop_at_hi.contains(k))
            .map(|(_, &i)| i)
            .chain(sym.add_at_hi.iter().copied())
            .collect();
        next_support.sort_unstable();
        next_support.dedup();
        chambers.push(Chamber {
            hi: cur.clone(),
            support: names,
            vol,
            g,
        });
    }
    Err(Error::Internal("sweep exceeded the chamber budget".into()))
}

/// Validates a candidate support at the frontier `t0` and computes the
/// chamber it governs. Returns `None` when the support is not the Zariski
/// support just beyond `t0` (failed wall, negative coefficient, or support
/// Gram not negative definite). A `Some` return certifies the decomposition
/// on the whole chamber: the support Gram is negative definite, the
/// coefficients stay nonnegative, and the affine part pairs nonnegatively
/// with every catalog curve and the ample class, which pins the unique
/// Zariski decomposition there.
fn chamber_from_support(
    ctx: &SweepCtx,
    support: Vec<usize>,
    t0: &Rat,
) -> Result<Option<ChamberSym>> {
    let cache = &ctx.cache;
    let (a_const, a_slope) = if support.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        let gram_t: Vec<Vec<Rat>> = support
            .iter()
            .map(|&i| {
                support
                    .iter()
                    .map(|&j| dot(&cache.catalog[i].cls, &cache.catalog_gv[j]))
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
        let rhs_const: Vec<Rat> = support
            .iter()
            .map(|&i| dot(ctx.l_up, &cache.catalog_gv[i]))
            .collect();
        let rhs_slope: Vec<Rat> = support
            .iter()
            .map(|&i| -dot(ctx.e, &cache.catalog_gv[i]))
            .collect();
        let ac = linalg::solve(&gram_t, &rhs_const)
            .ok_or_else(|| Error::Internal("singular negative definite Gram".into()))?;
        let sl = linalg::solve(&gram_t, &rhs_slope)
            .ok_or_else(|| Error::Internal("singular negative definite Gram".into()))?;
        (ac, sl)
    };

    let mut p_const = ctx.l_up.clone();
    let mut p_slope = ctx.e.neg();
    for (k, &i) in support.iter().enumerate() {
        p_const = p_const.sub(&cache.catalog[i].cls.scale(&a_const[k]));
        p_slope = p_slope.sub(&cache.catalog[i].cls.scale(&a_slope[k]));
    }

    enum Wall {
        Coeff(usize),
        Curve(usize),
        Cone,
    }
    // Affine walls u + v t >= 0 defining the chamber.
    let mut walls: Vec<(Rat, Rat, Wall)> = Vec::new();
    for k in 0..support.len() {
        walls.push((a_const[k].clone(), a_slope[k].clone(), Wall::Coeff(k)));
    }
    for (i, gv) in cache.catalog_gv.iter().enumerate() {
        if !support.contains(&i) {
            walls.push((dot(&p_const, gv), dot(&p_slope, gv), Wall::Curve(i)));
        }
    }
    for gv in &cache.nonneg_gv {
        walls.push((dot(&p_const, gv), dot(&p_slope, gv), Wall::Cone));
    }
    walls.push((
        dot(&p_const, &cache.ample_gv),
        dot(&p_slope, &cache.ample_gv),
        Wall::Cone,
    ));
    // D(t) . A >= 0 always gives a finite upper wall since E . A > 0.
    walls.push((
        dot(ctx.l_up, &cache.ample_gv),
        -dot(ctx.e, &cache.ample_gv),
        Wall::Cone,
    ));

    let mut hi: Option<Rat> = None;
    for (u, v, _) in &walls {
        let val0 = u + &(v * t0);
        if val0.is_negative() || (val0.is_zero() && v.is_negative()) {
            return Ok(None);
        }
        if v.is_negative() {
            let bound = -u / v;
            if hi.as_ref().is_none_or(|h| &bound < h) {
                hi = Some(bound);
            }
        }
    }
    let hi = hi.ok_or_else(|| Error::Internal("chamber has no upper wall".into()))?;
    debug_assert!(&hi > t0);

    let mut drop_at_hi = Vec::new();
    let mut add_at_hi = Vec::new();
    let mut ends_pseudoeffective = false;
    for (u, v, wall) in &walls {
        if (u + &(v * &hi)).is_zero() {
            match wall {
                Wall::Coeff(k) => drop_at_hi.push(*k),
                Wall::Curve(i) => {
                    if v.is_negative() {
                        add_at_hi.push(*i);
                    }
                }
                Wall::Cone => ends_pseudoeffective = true,
            }
        }
    }
    Ok(Some(ChamberSym {
        support,
        p_const,
        p_slope,
        hi,
        drop_at_hi,
        add_at_hi,
        ends_pseudoeffective,
    }))
}

/// Fallback for degenerate transitions: find the support governing the
/// chamber just beyond `cur` by decomposing at probes with shrinking steps.
fn probe_support(ctx: &SweepCtx, cur: &Rat, width_hint: &Rat) -> Result<ChamberSym> {
    let mut step = width_hint.clone().min(Rat::one());
    for _ in 0..200 {
        let probe_t = cur + &step;
        let d = ctx.l_up.sub(&ctx.e.scale(&probe_t));
        if let Some(dec) = try_decompose_cached(&d, ctx.s, &ctx.cache)? {
            let support: Vec<usize> = dec
                .certificate
                .support
                .iter()
                .map(|name| {
                    ctx.cache
                        .catalog
                        .iter()
                        .position(|c| &c.name == name)
                        .ok_or_else(|| Error::Internal("support curve missing from catalog".into()))
                })
                .collect::<Result<_>>()?;
            if let Some(sym) = chamber_from_support(ctx, support, cur)? {
                return Ok(sym);
            }
        }
        step = step / Rat::int(2);
    }
    Err(Error::Internal(
        "pseudo-effectivity ends without the volume reaching zero".into(),
    ))
}

fn vol_poly(ctx: &SweepCtx, sym: &ChamberSym) -> Poly {
    Poly::quadratic(
        ctx.s.pair(&sym.p_const, &sym.p_const),
        Rat::int(2) * ctx.s.pair(&sym.p_const, &sym.p_slope),
        ctx.s.pair(&sym.p_slope, &sym.p_slope),
    )
}

fn g_poly(ctx: &SweepCtx, sym: &ChamberSym) -> Poly {
    Poly::linear(dot(&sym.p_const, &ctx.e_gv), dot(&sym.p_slope, &ctx.e_gv))
}

/// Smallest root of `p` in `(lo, hi]`, given `p(lo) > 0`. Errors when a
/// root provably exists in the interval but is irrational.
fn first_root_in(p: &Poly, lo: &Rat, hi: &Rat) -> Result<Option<Rat>> {
    let c2 = p.coeff(2);
    let c1 = p.coeff(1);
    let c0 = p.coeff(0);
    if !p.eval(lo).is_positive() {
        return Err(Error::Internal(
            "volume not positive at chamber start".into(),
        ));
    }
    let mut candidates: Vec<Rat> = Vec::new();
    if c2.is_zero() {
        if !c1.is_zero() {
            candidates.push(-c0 / &c1);
        }
    } else {
        let disc = &c1 * &c1 - Rat::int(4) * &c2 * &c0;
        if disc.is_negative() {
            return Ok(None);
        }
        match disc.sqrt_exact() {
            Some(sq) => {
                let two_a = Rat::int(2) * &c2;
                candidates.push((-&c1 - &sq) / &two_a);
                candidates.push((-&c1 + &sq) / &two_a);
            }
            None => {
                // Irrational roots: acceptable only if they miss (lo, hi].
                let mut min_on_interval = p.eval(lo).min(p.eval(hi));
                let vertex = -&c1 / (Rat::int(2) * &c2);
                if &vertex > lo && &vertex < hi {
                    min_on_interval = min_on_interval.min(p.eval(&vertex));
                }
                if min_on_interval.is_positive() {
                    return Ok(None);
                }
                // On a surface with finitely generated effective cone and a
                // complete catalog, the pseudo-effective boundary is
                // rational; hitting this means the lattice data cannot
                // support an exact sweep.
                return Err(Error::Model(
                    "volume collapses at an irrational parameter; the catalog cannot be \
                     complete over a finitely generated effective cone"
                        .into(),
                ));
            }
        }
    }
    candidates.retain(|r| r > lo && r <= hi);
    candidates.sort();
    Ok(candidates.into_iter().next())
}

// ---------------------------------------------------------------------------
// Closed-form profile matchers
// ---------------------------------------------------------------------------

/// True iff `profile(t) / ln = 1 - (t/T)^n` as an exact polynomial identity
/// on every segment; equivalent to `S = (n/(n+1)) T`.
pub fn profile_match_fujita(profile: &PiecewisePoly, n: u32, ln: &Rat) -> Result<bool> {
    if n == 0 || !ln.is_positive() {
        return Err(Error::Input("need n >= 1 and positive volume".into()));
    }
    let t_end = profile.domain_end().clone();
    let mut coeffs = vec![Rat::zero(); n as usize + 1];
    coeffs[0] = ln.clone();
    coeffs[n as usize] = -ln / &t_end.pow(n);
    Ok(profile.matches_poly(&Poly(coeffs)))
}

/// True iff `profile(t) / ln = 1 - n (t/T)^{n-1} + (n-1)(t/T)^n` exactly;
/// for `n = 2` the closed form is `(1 - t/T)^2`.
pub fn profile_match_eq_adjunction(profile: &PiecewisePoly, n: u32, ln: &Rat) -> Result<bool> {
    if n < 2 || !ln.is_positive() {
        return Err(Error::Input("need n >= 2 and positive volume".into()));
    }
    let t_end = profile.domain_end().clone();
    let mut coeffs = vec![Rat::zero(); n as usize + 1];
    coeffs[0] = ln.clone();
    coeffs[n as usize - 1] = -(Rat::int(n as i64) * ln) / &t_end.pow(n - 1);
    coeffs[n as usize] = (Rat::int(n as i64 - 1) * ln) / &t_end.pow(n);
    Ok(profile.matches_poly(&Poly(coeffs)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ns_lattice::{blow_up, builtin_surface, BuiltinSpec, PointSpec};
    use crate::rat::rat;

    fn blown(spec: BuiltinSpec) -> PointModel {
        let s = builtin_surface(&spec).unwrap();
        blow_up(&s, &PointSpec::General).unwrap()
    }

    fn quad(c0: i64, c1: i64, c2: i64) -> Poly {
        Poly::quadratic(Rat::int(c0), Rat::int(c1), Rat::int(c2))
    }

    #[test]
    fn p2_profile() {
        let pm = blown(BuiltinSpec::P2);
        let scan = RayScan::over_point(&pm, &DivClass::from_ints(&[1])).unwrap();
        let vol = scan.vol_profile().unwrap();
        assert_eq!(vol.breakpoints, vec![Rat::zero(), Rat::one()]);
        assert_eq!(vol.segments, vec![quad(1, 0, -1)]);
        let g = scan.restricted_profile().unwrap();
        assert_eq!(g.segments, vec![Poly::linear(Rat::zero(), Rat::one())]);
        assert_eq!(
            scan.thresholds().unwrap(),
            (Rat::one(), Rat::one(), Rat::one())
        );
        assert_eq!(scan.s_invariant().unwrap(), rat(2, 3));
        assert_eq!(scan.fixed_part_degree().unwrap(), Rat::zero());
    }

    #[test]
    fn p1xp1_profile() {
        let pm = blown(BuiltinSpec::P1xP1);
        let scan = RayScan::over_point(&pm, &DivClass::from_ints(&[1, 1])).unwrap();
        let vol = scan.vol_profile().unwrap();
        assert_eq!(vol.breakpoints, vec![Rat::zero(), Rat::one(), Rat::int(2)]);
        assert_eq!(vol.segments, vec![quad(2, 0, -1), quad(4, -4, 1)]);
        let g = scan.restricted_profile().unwrap();
        assert_eq!(
            g.segments,
            vec![
                Poly::linear(Rat::zero(), Rat::one()),
                Poly::linear(Rat::int(2), Rat::int(-1)),
            ]
        );
        assert_eq!(scan.s_invariant().unwrap(), Rat::one());
        assert_eq!(scan.fixed_part_degree().unwrap(), rat(1, 3));
        let inv = scan.invariants().unwrap();
        assert_eq!(inv.eps, Rat::one());
        assert_eq!(inv.tau, Rat::int(2));
        assert_eq!(inv.log_discrepancy, Rat::int(2));
    }

    #[test]
    fn dp3_anticanonical_profile() {
        let pm = blown(BuiltinSpec::DelPezzo(3));
        let scan = RayScan::over_point(&pm, &pm.base.canonical.neg()).unwrap();
        let vol = scan.vol_profile().unwrap();
        assert_eq!(vol.breakpoints, vec![Rat::zero(), rat(3, 2), Rat::int(2)]);
        assert_eq!(vol.segments, vec![quad(3, 0, -1), quad(12, -12, 3)]);
        let g = scan.restricted_profile().unwrap();
        assert_eq!(
            g.segments,
            vec![
                Poly::linear(Rat::zero(), Rat::one()),
                Poly::linear(Rat::int(6), Rat::int(-3)),
            ]
        );
        let (eps, eta, tau) = scan.thresholds().unwrap();
        assert_eq!((eps, eta, tau), (rat(3, 2), rat(3, 2), Rat::int(2)));
        assert_eq!(scan.s_invariant().unwrap(), rat(7, 6));
        // Exact piecewise integration: (2/3) int_{3/2}^{2} (4x-6) 3(2-x) dx
        // = 1/6, the value forced by the chain identity S + deg F = 2/lambda.
        assert_eq!(scan.fixed_part_degree().unwrap(), rat(1, 6));
    }

    #[test]
    fn thresholds_bidegree_one_three() {
        let pm = blown(BuiltinSpec::P1xP1);
        let scan = RayScan::over_point(&pm, &DivClass::from_ints(&[1, 3])).unwrap();
        let (eps, _, tau) = scan.thresholds().unwrap();
        assert_eq!(eps, Rat::one());
        assert_eq!(tau, Rat::int(4)); // tau = a + b
        let vol = scan.vol_profile().unwrap();
        assert_eq!(
            vol.breakpoints,
            vec![Rat::zero(), Rat::one(), Rat::int(3), Rat::int(4)]
        );
        assert_eq!(
            vol.segments,
            vec![quad(6, 0, -1), quad(7, -2, 0), quad(16, -8, 1)]
        );
    }

    #[test]
    fn eps_direct_formula_cross_check() {
        // eps = min over catalog curves with E.C > 0 of (L.C)/(E.C) when the
        // curve wall binds before the positive-cone boundary.
        for (spec, l) in [
            (BuiltinSpec::P1xP1, DivClass::from_ints(&[2, 3])),
            (BuiltinSpec::DelPezzo(4), {
                let s = builtin_surface(&BuiltinSpec::DelPezzo(4)).unwrap();
                s.canonical.neg()
            }),
        ] {
            let s = builtin_surface(&spec).unwrap();
            let pm = blow_up(&s, &PointSpec::General).unwrap();
            let scan = RayScan::over_point(&pm, &l).unwrap();
            let l_up = pm.pullback(&l).unwrap();
            let wall = pm
                .blown
                .curves
                .iter()
                .filter_map(|c| {
                    let ec = pm.blown.pair(&pm.exceptional, &c.cls);
                    if ec.is_positive() {
                        Some(pm.blown.pair(&l_up, &c.cls) / ec)
                    } else {
                        None
                    }
                })
                .min()
                .expect("catalog wall exists");
            assert_eq!(scan.eps().unwrap(), wall);
        }
    }

    #[test]
    fn curve_ray_on_p2() {
        // S(O(1); line) = 1/3 with profile (1-t)^2 and g = 1-t
        let p2 = builtin_surface(&BuiltinSpec::P2).unwrap();
        let line = DivClass::from_ints(&[1]);
        let scan = RayScan::along_curve(&p2, &DivClass::from_ints(&[1]), &line).unwrap();
        assert_eq!(scan.s_invariant().unwrap(), rat(1, 3));
        let vol = scan.vol_profile().unwrap();
        assert_eq!(vol.segments, vec![quad(1, -2, 1)]);
        assert_eq!(scan.tau(), Rat::one());
        // fixed-part degree is specific to point blowups
        assert!(matches!(scan.fixed_part_degree(), Err(Error::Domain(_))));
    }

    #[test]
    fn curve_ray_ruling() {
        // degenerate direction with E^2 = 0 allowed for tau/vol
        let pp = builtin_surface(&BuiltinSpec::P1xP1).unwrap();
        let f1 = DivClass::from_ints(&[1, 0]);
        let scan = RayScan::along_curve(&pp, &DivClass::from_ints(&[2, 3]), &f1).unwrap();
        assert_eq!(scan.tau(), Rat::int(2));
        assert_eq!(scan.eps().unwrap(), Rat::int(2));
        assert_eq!(scan.s_invariant().unwrap(), Rat::one());
    }

    #[test]
    fn domain_errors() {
        let pm = blown(BuiltinSpec::P2);
        // non-ample L
        assert!(RayScan::over_point(&pm, &DivClass::from_ints(&[0])).is_err());
        assert!(RayScan::over_point(&pm, &DivClass::from_ints(&[-1])).is_err());
        // zero ray direction
        let p2 = builtin_surface(&BuiltinSpec::P2).unwrap();
        assert!(matches!(
            RayScan::along_curve(&p2, &DivClass::from_ints(&[1]), &DivClass::zero(1)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn matcher_examples() {
        let pm = blown(BuiltinSpec::P2);
        let scan = RayScan::over_point(&pm, &DivClass::from_ints(&[1])).unwrap();
        let p2_profile = scan.vol_profile().unwrap();
        assert!(profile_match_fujita(&p2_profile, 2, &Rat::one()).unwrap());
        assert!(!profile_match_eq_adjunction(&p2_profile, 2, &Rat::one()).unwrap());

        let pm = blown(BuiltinSpec::P1xP1);
        let scan = RayScan::over_point(&pm, &DivClass::from_ints(&[1, 1])).unwrap();
        let pp_profile = scan.vol_profile().unwrap();
        assert!(!profile_match_fujita(&pp_profile, 2, &Rat::int(2)).unwrap());

        // synthetic degree-3 closed form with T = 5/3
        let t_end = rat(5, 3);
        let ln = rat(7, 2);
        let synth = PiecewisePoly::single(
            t_end.clone(),
            Poly(vec![
                ln.clone(),
                Rat::zero(),
                Rat::zero(),
                -&ln / &t_end.pow(3),
            ]),
        )
        .unwrap();
        assert!(profile_match_fujita(&synth, 3, &ln).unwrap());

        // synthetic (1 - t/T)^2 adjunction form, n = 2, T = 3
        let t_end = Rat::int(3);
        let base = Poly::linear(Rat::one(), -(Rat::one() / &t_end));
        let synth2 = PiecewisePoly::single(t_end.clone(), base.pow(2).scale(&rat(5, 1))).unwrap();
        assert!(profile_match_eq_adjunction(&synth2, 2, &rat(5, 1)).unwrap());
        assert!(!profile_match_fujita(&synth2, 2, &rat(5, 1)).unwrap());

        // synthetic n = 3 adjunction form with T = 2
        let t_end = Rat::int(2);
        let ln = Rat::int(4);
        let mut coeffs = vec![Rat::zero(); 4];
        coeffs[0] = ln.clone();
        coeffs[2] = -(Rat::int(3) * &ln) / &t_end.pow(2);
        coeffs[3] = (Rat::int(2) * &ln) / &t_end.pow(3);
        let synth3 = PiecewisePoly::single(t_end, Poly(coeffs)).unwrap();
        assert!(profile_match_eq_adjunction(&synth3, 3, &ln).unwrap());
    }

    #[test]
    fn fujita_match_iff_s_equals_two_thirds_tau() {
        for (spec, l, expect) in [
            (BuiltinSpec::P2, DivClass::from_ints(&[1]), true),
            (BuiltinSpec::P1xP1, DivClass::from_ints(&[1, 1]), false),
            (
                BuiltinSpec::DelPezzo(3),
                {
                    let s = builtin_surface(&BuiltinSpec::DelPezzo(3)).unwrap();
                    s.canonical.neg()
                },
                false,
            ),
        ] {
            let s = builtin_surface(&spec).unwrap();
            let pm = blow_up(&s, &PointSpec::General).unwrap();
            let scan = RayScan::over_point(&pm, &l).unwrap();
            let vol = scan.vol_profile().unwrap();
            let matched = profile_match_fujita(&vol, 2, scan.l_square()).unwrap();
            assert_eq!(matched, expect);
            let s_val = scan.s_invariant().unwrap();
            let two_thirds_tau = Rat::int(2) * scan.tau() / Rat::int(3);
            assert_eq!(matched, s_val == two_thirds_tau);
        }
    }

    #[test]
    fn csv_emission() {
        let pm = blown(BuiltinSpec::P1xP1);
        let scan = RayScan::over_point(&pm, &DivClass::from_ints(&[1, 1])).unwrap();
        let mut out = Vec::new();
        scan.write_csv(&rat(1, 2), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,vol,g,t_dec,vol_dec,g_dec");
        assert_eq!(lines.len(), 6); // t = 0, 1/2, 1, 3/2, 2
        assert!(lines[2].starts_with("1/2,7/4,1/2,"));
        assert!(lines[5].starts_with("2,0,0,"));
    }
}
