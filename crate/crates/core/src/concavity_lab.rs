//! Exact verification engine for two integral inequalities over
//! piecewise-linear concave functions, with seeded random generators for
//! property testing and the extremal cases constructed symbolically.
//!
//! The first inequality (point-center form): for `0 < a <= b` and `g`
//! bounded concave on `[0, b]` with `g(x) = x` on `[0, a]`,
//!
//! ```text
//!   3a * int_0^b (2x - g(x)) g(x) dx  <=  4 (int_0^b g(x) dx)^2,
//! ```
//!
//! with equality iff `a = b` or `g` equals the tent function `h` (identity
//! up to `a`, then the line to `(b, 0)`); at equality `int g = ab/2`.
//!
//! The second (divisor-center form): for `g >= 0` concave on `[0, a]` with
//! `g(0) > 0` and an integer `n >= 1`,
//!
//! ```text
//!   g(0)^{n-1} int_0^a x g(x)^{n-1} dx  <=  n/(n+1) (int_0^a g^{n-1} dx)^2,
//! ```
//!
//! with equality iff `n = 1` or `g(x) = (1 - x/a) g(0)`.
//!
//! Piecewise-linear functions with rational nodes admit exact integration
//! (the powers are expanded symbolically) and are dense enough to exercise
//! both statements.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rat::Rat;

/// Piecewise-linear concave function given by nodes with strictly
/// increasing rational abscissae starting at 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PLConcave {
    pub nodes: Vec<(Rat, Rat)>,
}

impl PLConcave {
    pub fn new(nodes: Vec<(Rat, Rat)>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::Input("need at least two nodes".into()));
        }
        if !nodes[0].0.is_zero() {
            return Err(Error::Input("domain must start at 0".into()));
        }
        for w in nodes.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::Input("node abscissae must strictly increase".into()));
            }
        }
        let f = PLConcave { nodes };
        let slopes = f.slopes();
        if slopes.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Input(
                "slopes must be non-increasing (concavity)".into(),
            ));
        }
        Ok(f)
    }

    pub fn domain_end(&self) -> &Rat {
        &self.nodes.last().expect("nonempty").0
    }

    fn slopes(&self) -> Vec<Rat> {
        self.nodes
            .windows(2)
            .map(|w| (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0))
            .collect()
    }

    pub fn eval(&self, x: &Rat) -> Result<Rat> {
        if x < &self.nodes[0].0 || x > self.domain_end() {
            return Err(Error::Domain(format!("{x} outside domain")));
        }
        for w in self.nodes.windows(2) {
            if x <= &w[1].0 {
                let slope = (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0);
                return Ok(&w[0].1 + &(slope * (x - &w[0].0)));
            }
        }
        unreachable!("domain checked")
    }

    /// Segment polynomials in the global variable, one per node interval.
    fn segment_polys(&self) -> Vec<(Rat, Rat, Poly)> {
        self.nodes
            .windows(2)
            .map(|w| {
                let slope = (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0);
                let intercept = &w[0].1 - &(&slope * &w[0].0);
                (
                    w[0].0.clone(),
                    w[1].0.clone(),
                    Poly::linear(intercept, slope),
                )
            })
            .collect()
    }

    /// Exact `int_0^B op(segment) dx`.
    fn map_integral(&self, op: impl Fn(&Poly) -> Poly) -> Rat {
        self.segment_polys()
            .iter()
            .map(|(lo, hi, p)| op(p).integrate(lo, hi))
            .sum()
    }

    pub fn integral(&self) -> Rat {
        self.map_integral(|p| p.clone())
    }

    /// True iff `g(x) = x` exactly on `[0, a]`.
    pub fn equals_identity_up_to(&self, a: &Rat) -> bool {
        if a > self.domain_end() {
            return false;
        }
        for (lo, hi, p) in self.segment_polys() {
            if &lo >= a {
                break;
            }
            let ident = Poly::linear(Rat::zero(), Rat::one());
            if hi <= *a {
                if !p.sub(&ident).is_zero() {
                    return false;
                }
            } else {
                // segment straddles a: must agree on [lo, a], so everywhere
                if !p.sub(&ident).is_zero() {
                    return false;
                }
            }
        }
        match self.eval(a) {
            Ok(v) => v == *a,
            Err(_) => false,
        }
    }
}

/// Outcome of one inequality check: both sides exactly, whether the
/// inequality holds (it must: a violation is a build-stopping bug), and
/// whether it is an equality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalcCheck {
    pub lhs: Rat,
    pub rhs: Rat,
    pub holds: bool,
    pub equality: bool,
}

/// The tent extremal of the point-center inequality: identity on `[0, a]`,
/// then the chord `a (b-x)/(b-a)` down to `(b, 0)`.
pub fn tent(a: &Rat, b: &Rat) -> Result<PLConcave> {
    if !a.is_positive() || a >= b {
        return Err(Error::Domain("need 0 < a < b".into()));
    }
    PLConcave::new(vec![
        (Rat::zero(), Rat::zero()),
        (a.clone(), a.clone()),
        (b.clone(), Rat::zero()),
    ])
}

/// Point-center inequality check. Preconditions: `0 < a <= b`, `g` defined
/// on exactly `[0, b]`, `g(x) = x` on `[0, a]` (validated exactly). On
/// equality the identity `int_0^b g = ab/2` is additionally asserted.
pub fn check_center_pt(a: &Rat, b: &Rat, g: &PLConcave) -> Result<CalcCheck> {
    if !a.is_positive() || a > b {
        return Err(Error::Domain("need 0 < a <= b".into()));
    }
    if g.domain_end() != b {
        return Err(Error::Domain("g must be defined on exactly [0, b]".into()));
    }
    if !g.equals_identity_up_to(a) {
        return Err(Error::Domain("g must equal x on [0, a]".into()));
    }
    let two_x = Poly::linear(Rat::zero(), Rat::int(2));
    let lhs = Rat::int(3) * a * g.map_integral(|p| two_x.sub(p).mul(p));
    let int_g = g.integral();
    let rhs = Rat::int(4) * &int_g * &int_g;
    if lhs > rhs {
        return Err(Error::Internal(format!(
            "point-center inequality violated: {lhs} > {rhs}"
        )));
    }
    let equality = lhs == rhs;
    if equality && Rat::int(2) * &int_g != a * b {
        return Err(Error::Internal(
            "equality case must satisfy int g = ab/2".into(),
        ));
    }
    Ok(CalcCheck {
        lhs,
        rhs,
        holds: true,
        equality,
    })
}

/// Divisor-center inequality check for `1 <= n <= 8` (the power cap bounds
/// coefficient growth). Preconditions: `g >= 0` on `[0, a]`, `g(0) > 0`.
pub fn check_center_div(a: &Rat, n: u32, g: &PLConcave) -> Result<CalcCheck> {
    if !(1..=8).contains(&n) {
        return Err(Error::Domain("n must be in 1..=8".into()));
    }
    if !a.is_positive() || g.domain_end() != a {
        return Err(Error::Domain(
            "g must be defined on exactly [0, a], a > 0".into(),
        ));
    }
    if g.nodes.iter().any(|(_, y)| y.is_negative()) {
        return Err(Error::Domain("g must be nonnegative".into()));
    }
    let g0 = g.nodes[0].1.clone();
    if !g0.is_positive() {
        return Err(Error::Domain("g(0) must be positive".into()));
    }
    let gn = |p: &Poly| p.pow(n - 1);
    let lhs = g0.pow(n - 1) * g.map_integral(|p| gn(p).mul_t());
    let int_gn = g.map_integral(|p| gn(p));
    let rhs = Rat::new(n as i64, n as i64 + 1) * &int_gn * &int_gn;
    if lhs > rhs {
        return Err(Error::Internal(format!(
            "divisor-center inequality violated at n={n}: {lhs} > {rhs}"
        )));
    }
    let equality = lhs == rhs;
    Ok(CalcCheck {
        lhs,
        rhs,
        holds: true,
        equality,
    })
}

/// Monotonicity claim extracted from the point-center proof: with
/// `f = g - h` shifted to start at `a` and extended by zero,
/// `int_0^c (3x - 2c) f(x) dx <= 0` where `c = b - a`.
pub fn center_pt_shift_claim(a: &Rat, b: &Rat, g: &PLConcave) -> Result<bool> {
    if a >= b {
        return Ok(true); // nothing to check when the interval is empty
    }
    let h = tent(a, b)?;
    let c = b - a;
    // f(x) = g(x + a) - h(x + a) on [0, c]; integrate (3x - 2c) f exactly by
    // splitting at every node of either function.
    let mut cuts: Vec<Rat> = Vec::new();
    for (x, _) in g.nodes.iter().chain(&h.nodes) {
        if x >= a && x <= b {
            cuts.push(x - a);
        }
    }
    cuts.push(Rat::zero());
    cuts.push(c.clone());
    cuts.sort();
    cuts.dedup();
    let weight = Poly::linear(Rat::int(-2) * &c, Rat::int(3));
    let mut acc = Rat::zero();
    for w in cuts.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        // f is affine between consecutive cuts; recover it from endpoints
        let f_lo = g.eval(&(lo + a))? - h.eval(&(lo + a))?;
        let f_hi = g.eval(&(hi + a))? - h.eval(&(hi + a))?;
        let slope = (&f_hi - &f_lo) / &(hi - lo);
        let seg = Poly::linear(&f_lo - &(&slope * lo), slope);
        acc = acc + weight.mul(&seg).integrate(lo, hi);
    }
    Ok(!acc.is_positive())
}

/// Constraint profile for the seeded generator.
#[derive(Clone, Debug)]
pub enum ConcaveConstraint {
    /// `g(x) = x` on `[0, a]` (point-center input shape).
    EqualsXUpTo(Rat),
    /// `g >= 0` with `g(0) > 0` (divisor-center input shape).
    Nonneg,
}

fn rand_rat(rng: &mut ChaCha8Rng, max_num: i64, max_den: i64) -> Rat {
    let p = rng.gen_range(1..=max_num);
    let q = rng.gen_range(1..=max_den);
    Rat::new(p, q)
}

/// Deterministic-by-seed concave piecewise-linear function on `[0, B]`
/// satisfying the requested constraint. The same seed always reproduces the
/// same nodes.
pub fn random_concave(
    seed: u64,
    b_end: &Rat,
    node_count: usize,
    constraint: &ConcaveConstraint,
) -> Result<PLConcave> {
    if node_count < 2 {
        return Err(Error::Domain("need at least two nodes".into()));
    }
    if !b_end.is_positive() {
        return Err(Error::Domain("domain end must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match constraint {
        ConcaveConstraint::EqualsXUpTo(a) => {
            if !a.is_positive() || a >= b_end {
                return Err(Error::Domain(
                    "unsatisfiable constraint: need 0 < a < B".into(),
                ));
            }
            let mut nodes = vec![(Rat::zero(), Rat::zero()), (a.clone(), a.clone())];
            // strictly decreasing slopes starting below 1 on (a, B]
            let free = node_count.saturating_sub(2).max(1);
            let mut xs: Vec<Rat> = (0..free - 1)
                .map(|_| a + &(rand_rat(&mut rng, 16, 8) / Rat::int(16) * (b_end - a)))
                .filter(|x| x > a && x < b_end)
                .collect();
            xs.push(b_end.clone());
            xs.sort();
            xs.dedup();
            let mut slope = Rat::one() - rand_rat(&mut rng, 8, 4) / Rat::int(8);
            let mut prev = (a.clone(), a.clone());
            for x in xs {
                let y = &prev.1 + &(&slope * &(&x - &prev.0));
                nodes.push((x.clone(), y.clone()));
                prev = (x, y);
                slope = slope - rand_rat(&mut rng, 6, 3) / Rat::int(6);
            }
            PLConcave::new(nodes)
        }
        ConcaveConstraint::Nonneg => {
            let g0 = rand_rat(&mut rng, 8, 4);
            let mut xs: Vec<Rat> = (0..node_count.saturating_sub(2))
                .map(|_| rand_rat(&mut rng, 16, 8) / Rat::int(16) * b_end)
                .filter(|x| x.is_positive() && x < b_end)
                .collect();
            xs.push(b_end.clone());
            xs.sort();
            xs.dedup();
            let mut slope = rand_rat(&mut rng, 4, 4) - Rat::one(); // in (-1, 3]... shifted below
            let mut nodes = vec![(Rat::zero(), g0.clone())];
            let mut prev = (Rat::zero(), g0);
            for x in xs {
                let y = &prev.1 + &(&slope * &(&x - &prev.0));
                nodes.push((x.clone(), y.clone()));
                prev = (x, y);
                slope = slope - rand_rat(&mut rng, 6, 3) / Rat::int(3);
            }
            // shift up so the minimum is nonnegative (preserves concavity)
            let min_y = nodes
                .iter()
                .map(|(_, y)| y.clone())
                .min()
                .expect("nonempty");
            if min_y.is_negative() {
                for node in &mut nodes {
                    node.1 = &node.1 - &min_y;
                }
            }
            PLConcave::new(nodes)
        }
    }
}

/// One seeded point-center case: derives `a < b` and a conforming random
/// concave `g` from the seed, runs the check. Roughly one seed in ten takes
/// `a = b` (equality regardless of `g`), and one in seven takes `g` equal to
/// the tent extremal.
pub fn center_pt_case(seed: u64) -> Result<CalcCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let a = rand_rat(&mut rng, 8, 4);
    if seed % 10 == 3 {
        // a = b: g is forced to be the identity on the whole domain
        let g = PLConcave::new(vec![(Rat::zero(), Rat::zero()), (a.clone(), a.clone())])?;
        return check_center_pt(&a, &a, &g);
    }
    let b = &a + &rand_rat(&mut rng, 8, 4);
    let g = if seed % 7 == 2 {
        tent(&a, &b)?
    } else {
        let nodes = 3 + (seed % 4) as usize;
        random_concave(seed, &b, nodes, &ConcaveConstraint::EqualsXUpTo(a.clone()))?
    };
    check_center_pt(&a, &b, &g)
}

/// One seeded divisor-center case with `n` cycling through `2..=8`; one
/// seed in nine takes the linear extremal `g(x) = (1 - x/a) g(0)`.
pub fn center_div_case(seed: u64) -> Result<(u32, CalcCheck)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0xd134_2543_de82_ef95));
    let n = 2 + (seed % 7) as u32;
    let a = rand_rat(&mut rng, 8, 4);
    let g = if seed % 9 == 4 {
        let g0 = rand_rat(&mut rng, 8, 4);
        PLConcave::new(vec![(Rat::zero(), g0), (a.clone(), Rat::zero())])?
    } else {
        let nodes = 3 + (seed % 4) as usize;
        random_concave(seed, &a, nodes, &ConcaveConstraint::Nonneg)?
    };
    Ok((n, check_center_div(&a, n, &g)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn seeded_cases_run_clean() {
        for seed in 0..200u64 {
            let chk = center_pt_case(seed).unwrap();
            assert!(chk.holds, "seed {seed}");
            if seed % 10 == 3 || seed % 7 == 2 {
                assert!(chk.equality, "extremal seed {seed}");
            }
            let (n, chk) = center_div_case(seed).unwrap();
            assert!((2..=8).contains(&n));
            assert!(chk.holds, "seed {seed}");
            if seed % 9 == 4 {
                assert!(chk.equality, "linear extremal seed {seed}");
            }
        }
    }

    #[test]
    fn tent_is_extremal() {
        // a=1, b=2: lhs = rhs = 4, and int g = ab/2 = 1
        let h = tent(&Rat::one(), &Rat::int(2)).unwrap();
        let chk = check_center_pt(&Rat::one(), &Rat::int(2), &h).unwrap();
        assert_eq!(chk.lhs, Rat::int(4));
        assert_eq!(chk.rhs, Rat::int(4));
        assert!(chk.equality);
        assert_eq!(h.integral(), Rat::one());
    }

    #[test]
    fn a_equals_b_forces_equality() {
        // a = b = 1, g(x) = x
        let g = PLConcave::new(vec![(Rat::zero(), Rat::zero()), (Rat::one(), Rat::one())]).unwrap();
        let chk = check_center_pt(&Rat::one(), &Rat::one(), &g).unwrap();
        assert!(chk.equality);
    }

    #[test]
    fn node_above_tent_is_strict() {
        // a=1, b=2 with node (3/2, 3/4) strictly above h(3/2) = 1/2
        let g = PLConcave::new(vec![
            (Rat::zero(), Rat::zero()),
            (Rat::one(), Rat::one()),
            (rat(3, 2), rat(3, 4)),
            (Rat::int(2), Rat::zero()),
        ])
        .unwrap();
        let chk = check_center_pt(&Rat::one(), &Rat::int(2), &g).unwrap();
        assert!(chk.holds);
        assert!(!chk.equality);
        assert!(chk.lhs < chk.rhs);
    }

    #[test]
    fn divisor_center_examples() {
        // n = 1: equality with both sides a^2/2
        let g = PLConcave::new(vec![(Rat::zero(), Rat::one()), (Rat::one(), rat(1, 2))]).unwrap();
        let chk = check_center_div(&Rat::one(), 1, &g).unwrap();
        assert!(chk.equality);
        assert_eq!(chk.lhs, rat(1, 2));

        // n = 2, g = 1 - x on [0,1]: lhs = rhs = 1/6
        let lin =
            PLConcave::new(vec![(Rat::zero(), Rat::one()), (Rat::one(), Rat::zero())]).unwrap();
        let chk = check_center_div(&Rat::one(), 2, &lin).unwrap();
        assert_eq!(chk.lhs, rat(1, 6));
        assert_eq!(chk.rhs, rat(1, 6));
        assert!(chk.equality);

        // n = 3, g = 1 on [0,1]: 1/2 < 3/4 strict
        let flat =
            PLConcave::new(vec![(Rat::zero(), Rat::one()), (Rat::one(), Rat::one())]).unwrap();
        let chk = check_center_div(&Rat::one(), 3, &flat).unwrap();
        assert_eq!(chk.lhs, rat(1, 2));
        assert_eq!(chk.rhs, rat(3, 4));
        assert!(!chk.equality);
    }

    #[test]
    fn perturbing_extremal_breaks_equality() {
        // pushing the interior of the linear extremal up by any positive
        // rational loses equality (n >= 2)
        for eps in [rat(1, 100), rat(1, 7), rat(1, 2)] {
            let g = PLConcave::new(vec![
                (Rat::zero(), Rat::one()),
                (rat(1, 2), rat(1, 2) + eps),
                (Rat::one(), Rat::zero()),
            ])
            .unwrap();
            let chk = check_center_div(&Rat::one(), 2, &g).unwrap();
            assert!(!chk.equality);
        }
    }

    #[test]
    fn generator_is_deterministic_and_valid() {
        for seed in 0..50u64 {
            let a = rat(1, 1);
            let g1 = random_concave(
                seed,
                &Rat::int(2),
                5,
                &ConcaveConstraint::EqualsXUpTo(a.clone()),
            )
            .unwrap();
            let g2 = random_concave(
                seed,
                &Rat::int(2),
                5,
                &ConcaveConstraint::EqualsXUpTo(a.clone()),
            )
            .unwrap();
            assert_eq!(g1, g2);
            assert!(g1.equals_identity_up_to(&a));
            let chk = check_center_pt(&a, &Rat::int(2), &g1).unwrap();
            assert!(chk.holds);

            let f = random_concave(seed, &Rat::one(), 4, &ConcaveConstraint::Nonneg).unwrap();
            assert!(f.nodes.iter().all(|(_, y)| !y.is_negative()));
            assert!(f.nodes[0].1.is_positive());
            for n in 1..=8 {
                assert!(check_center_div(&Rat::one(), n, &f).unwrap().holds);
            }
        }
    }

    #[test]
    fn shift_claim_on_seeded_inputs() {
        let a = Rat::one();
        let b = Rat::int(2);
        for seed in 0..100u64 {
            let g =
                random_concave(seed, &b, 5, &ConcaveConstraint::EqualsXUpTo(a.clone())).unwrap();
            assert!(center_pt_shift_claim(&a, &b, &g).unwrap(), "seed {seed}");
        }
    }

    #[test]
    fn unsatisfiable_constraints_rejected() {
        assert!(matches!(
            random_concave(
                1,
                &Rat::one(),
                4,
                &ConcaveConstraint::EqualsXUpTo(Rat::int(2))
            ),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            random_concave(1, &Rat::one(), 1, &ConcaveConstraint::Nonneg),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn precondition_violations_are_domain_errors() {
        // g must equal x on [0, a]
        let g = PLConcave::new(vec![
            (Rat::zero(), Rat::zero()),
            (Rat::one(), rat(1, 2)),
            (Rat::int(2), Rat::zero()),
        ])
        .unwrap();
        assert!(matches!(
            check_center_pt(&Rat::one(), &Rat::int(2), &g),
            Err(Error::Domain(_))
        ));
        // a must be positive and at most b
        let h = tent(&Rat::one(), &Rat::int(2)).unwrap();
        assert!(matches!(
            check_center_pt(&Rat::int(3), &Rat::int(2), &h),
            Err(Error::Domain(_))
        ));
        // divisor form: g(0) > 0 required
        let z =
            PLConcave::new(vec![(Rat::zero(), Rat::zero()), (Rat::one(), Rat::zero())]).unwrap();
        assert!(matches!(
            check_center_div(&Rat::one(), 2, &z),
            Err(Error::Domain(_))
        ));
        // n capped at 8
        let f = PLConcave::new(vec![(Rat::zero(), Rat::one()), (Rat::one(), Rat::one())]).unwrap();
        assert!(matches!(
            check_center_div(&Rat::one(), 9, &f),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn validation_rejects_non_concave() {
        assert!(PLConcave::new(vec![
            (Rat::zero(), Rat::zero()),
            (Rat::one(), Rat::zero()),
            (Rat::int(2), Rat::one()),
        ])
        .is_err());
    }
}
