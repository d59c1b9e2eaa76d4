//! Dense univariate polynomials over [`Rat`] and piecewise-polynomial
//! functions with exact rational breakpoints.
//!
//! Everything here is exact: integrals are antiderivatives evaluated at
//! rational endpoints, never quadrature.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rat::Rat;

/// Polynomial with coefficients in ascending degree order. The zero
/// polynomial is the empty coefficient list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Poly(pub Vec<Rat>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: Rat) -> Self {
        Poly(vec![c]).normalized()
    }

    /// `c0 + c1 t`.
    pub fn linear(c0: Rat, c1: Rat) -> Self {
        Poly(vec![c0, c1]).normalized()
    }

    /// `c0 + c1 t + c2 t^2`.
    pub fn quadratic(c0: Rat, c1: Rat, c2: Rat) -> Self {
        Poly(vec![c0, c1, c2]).normalized()
    }

    fn normalized(mut self) -> Self {
        while self.0.last().is_some_and(Rat::is_zero) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.0.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn eval(&self, t: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.0.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect()).normalized()
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect()).normalized()
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        Poly(self.0.iter().map(|a| a * c).collect()).normalized()
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Poly(out).normalized()
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::constant(Rat::one());
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly::zero();
        }
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * &Rat::int(i as i64))
                .collect(),
        )
        .normalized()
    }

    /// Exact definite integral over `[lo, hi]`.
    pub fn integrate(&self, lo: &Rat, hi: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for (i, c) in self.0.iter().enumerate() {
            let k = Rat::int((i + 1) as i64);
            acc = acc + c * &((hi.pow(i as u32 + 1) - lo.pow(i as u32 + 1)) / k);
        }
        acc
    }

    /// The polynomial `t * self`.
    pub fn mul_t(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero()];
        out.extend(self.0.iter().cloned());
        Poly(out)
    }
}

/// A function on `[0, T]` given by exact rational breakpoints and one
/// polynomial per segment. Used both for the piecewise-quadratic volume
/// profile along a ray and for the piecewise-linear restricted profile;
/// synthetic closed-form profiles of higher degree are also representable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewisePoly {
    /// Strictly increasing, starting at 0; the last entry is the domain end.
    pub breakpoints: Vec<Rat>,
    /// One polynomial per interval `[breakpoints[i], breakpoints[i+1]]`.
    pub segments: Vec<Poly>,
}

impl PiecewisePoly {
    pub fn new(breakpoints: Vec<Rat>, segments: Vec<Poly>) -> Result<Self> {
        if breakpoints.len() != segments.len() + 1 || segments.is_empty() {
            return Err(Error::Input(
                "piecewise function needs k segments and k+1 breakpoints".into(),
            ));
        }
        if !breakpoints[0].is_zero() {
            return Err(Error::Input("piecewise domain must start at 0".into()));
        }
        for w in breakpoints.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Input(
                    "breakpoints must be strictly increasing".into(),
                ));
            }
        }
        Ok(PiecewisePoly {
            breakpoints,
            segments,
        })
    }

    /// Single segment on `[0, end]`.
    pub fn single(end: Rat, poly: Poly) -> Result<Self> {
        PiecewisePoly::new(vec![Rat::zero(), end], vec![poly])
    }

    pub fn domain_end(&self) -> &Rat {
        self.breakpoints.last().expect("nonempty")
    }

    /// Value at `t`; breakpoints evaluate on the left segment (continuity
    /// makes the choice immaterial for profiles produced by this crate).
    pub fn eval(&self, t: &Rat) -> Result<Rat> {
        if t < &self.breakpoints[0] || t > self.domain_end() {
            return Err(Error::Domain(format!("{t} outside profile domain")));
        }
        for (i, seg) in self.segments.iter().enumerate() {
            if t <= &self.breakpoints[i + 1] {
                return Ok(seg.eval(t));
            }
        }
        Ok(self.segments.last().expect("nonempty").eval(t))
    }

    /// Exact equality of one-sided values at every interior breakpoint.
    pub fn is_continuous(&self) -> bool {
        for i in 1..self.segments.len() {
            let t = &self.breakpoints[i];
            if self.segments[i - 1].eval(t) != self.segments[i].eval(t) {
                return false;
            }
        }
        true
    }

    /// Exact integral of `f` over the whole domain.
    pub fn integral(&self) -> Rat {
        self.map_integral(|seg| seg.clone())
    }

    /// Exact integral of `t * f(t)` over the whole domain.
    pub fn integral_t(&self) -> Rat {
        self.map_integral(Poly::mul_t)
    }

    /// Integrates `op(segment)` segment by segment.
    pub fn map_integral(&self, op: impl Fn(&Poly) -> Poly) -> Rat {
        let mut acc = Rat::zero();
        for (i, seg) in self.segments.iter().enumerate() {
            acc = acc + op(seg).integrate(&self.breakpoints[i], &self.breakpoints[i + 1]);
        }
        acc
    }

    /// Integrates `op(self_segment, other_segment)` over the common domain.
    /// The two profiles must share breakpoints (profiles from one ray sweep do).
    pub fn zip_integral(
        &self,
        other: &PiecewisePoly,
        op: impl Fn(&Poly, &Poly) -> Poly,
    ) -> Result<Rat> {
        if self.breakpoints != other.breakpoints {
            return Err(Error::Internal(
                "zip_integral requires aligned breakpoints".into(),
            ));
        }
        let mut acc = Rat::zero();
        for i in 0..self.segments.len() {
            acc = acc
                + op(&self.segments[i], &other.segments[i])
                    .integrate(&self.breakpoints[i], &self.breakpoints[i + 1]);
        }
        Ok(acc)
    }

    /// True iff `self` equals `target` as an exact polynomial identity on
    /// every segment.
    pub fn matches_poly(&self, target: &Poly) -> bool {
        self.segments.iter().all(|seg| seg.sub(target).is_zero())
    }

    /// Nonnegativity on the whole domain for segments of degree <= 2,
    /// checked via endpoints and the interior critical point.
    pub fn nonneg_deg2(&self) -> Result<bool> {
        for (i, seg) in self.segments.iter().enumerate() {
            if seg.degree() > 2 {
                return Err(Error::Internal("nonneg check limited to degree 2".into()));
            }
            let (lo, hi) = (&self.breakpoints[i], &self.breakpoints[i + 1]);
            if seg.eval(lo).is_negative() || seg.eval(hi).is_negative() {
                return Ok(false);
            }
            let c2 = seg.coeff(2);
            if c2.is_positive() {
                // convex: interior minimum at the vertex
                let v = -seg.coeff(1) / (Rat::int(2) * &c2);
                if &v > lo && &v < hi && seg.eval(&v).is_negative() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Non-increasing on the whole domain for segments of degree <= 2
    /// (derivative is affine: endpoint signs suffice).
    pub fn non_increasing_deg2(&self) -> Result<bool> {
        for (i, seg) in self.segments.iter().enumerate() {
            if seg.degree() > 2 {
                return Err(Error::Internal(
                    "monotonicity check limited to degree 2".into(),
                ));
            }
            let d = seg.derivative();
            if d.eval(&self.breakpoints[i]).is_positive()
                || d.eval(&self.breakpoints[i + 1]).is_positive()
            {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
