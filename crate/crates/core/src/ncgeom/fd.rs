// SPDX-License-Identifier: Apache-2.0

//! Central finite differences of `f_A` in real coordinates.
//!
//! This is the independent check on the closed-form jet. Second differences
//! divide by `h²`, so `f_A` is evaluated in double-double arithmetic; the
//! displaced points `ψ ± h e_k` are then represented exactly and the
//! rounding error of a difference stays far below its `O(h²)` truncation
//! error for every admissible `h`.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use twofloat::TwoFloat;

use super::{NCValue, RealJet};
use crate::error::{Error, Result};
use crate::hilbert::{complement_projector, same_dim, Operator, ProjectiveState, C64, ZERO};

const H_MIN: f64 = 1e-8;
const H_MAX: f64 = 1e-3;

#[derive(Clone, Copy, Debug)]
struct Dd {
    re: TwoFloat,
    im: TwoFloat,
}

impl Dd {
    fn zero() -> Self {
        Dd {
            re: TwoFloat::from(0.0),
            im: TwoFloat::from(0.0),
        }
    }

    fn from_c64(z: C64) -> Self {
        Dd {
            re: TwoFloat::from(z.re),
            im: TwoFloat::from(z.im),
        }
    }

    fn conj(self) -> Self {
        Dd {
            re: self.re,
            im: -self.im,
        }
    }

    fn scale(self, x: TwoFloat) -> Self {
        Dd {
            re: self.re * x,
            im: self.im * x,
        }
    }

    fn norm_sqr(self) -> TwoFloat {
        self.re * self.re + self.im * self.im
    }

    fn to_c64(self) -> C64 {
        C64::new(self.re.hi() + self.re.lo(), self.im.hi() + self.im.lo())
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        Dd {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        Dd {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        Dd {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

/// Quotient refined by one Newton step. `TwoFloat` division on its own is
/// only about as accurate as `f64`.
fn div(n: TwoFloat, d: TwoFloat) -> TwoFloat {
    let q = n / d;
    q + (n - q * d) / d
}

/// `f_A` at `base + Σ (coordinate, step)` where coordinate `k < N` shifts
/// `Re z_k` and `k >= N` shifts `Im z_{k-N}`.
struct Evaluator<'a> {
    a: &'a Operator,
    base: Vec<C64>,
}

impl Evaluator<'_> {
    fn eval(&self, shifts: &[(usize, f64)]) -> Dd {
        let n = self.base.len();
        let mut z: Vec<Dd> = self.base.iter().map(|&c| Dd::from_c64(c)).collect();
        for &(k, step) in shifts {
            if k < n {
                z[k].re = TwoFloat::new_add(self.base[k].re, step);
            } else {
                z[k - n].im = TwoFloat::new_add(self.base[k - n].im, step);
            }
        }
        // Subtracting a[0][0] on the diagonal makes scalar operators give a
        // constant, so their differences vanish exactly.
        let m = self.a.matrix();
        let shift = m[(0, 0)];
        let mut num = Dd::zero();
        let mut den = TwoFloat::from(0.0);
        for i in 0..n {
            let mut row = Dd::zero();
            for j in 0..n {
                let aij = if i == j { m[(i, j)] - shift } else { m[(i, j)] };
                if aij != ZERO {
                    row = row + Dd::from_c64(aij) * z[j];
                }
            }
            num = num + z[i].conj() * row;
            den += z[i].norm_sqr();
        }
        Dd {
            re: div(num.re, den),
            im: div(num.im, den),
        } + Dd::from_c64(shift)
    }
}

/// Real-coordinate derivatives of `f_A` at `psi` by central differences.
pub fn finite_difference_real_jet(a: &Operator, psi: &ProjectiveState, h: f64) -> Result<RealJet> {
    if !(H_MIN..=H_MAX).contains(&h) {
        return Err(Error::StepOutOfRange(h));
    }
    same_dim(a.dim(), psi.dim())?;
    let n = psi.dim();
    let dim = 2 * n;
    let ev = Evaluator {
        a,
        base: psi.amplitudes().iter().copied().collect(),
    };
    let h_dd = TwoFloat::from(h);
    let f0 = ev.eval(&[]);
    let plus: Vec<Dd> = (0..dim).map(|k| ev.eval(&[(k, h)])).collect();
    let minus: Vec<Dd> = (0..dim).map(|k| ev.eval(&[(k, -h)])).collect();

    let inv_2h = TwoFloat::from(1.0) / (h_dd * 2.0);
    let grad: Vec<C64> = (0..dim)
        .map(|k| (plus[k] - minus[k]).scale(inv_2h).to_c64())
        .collect();

    let inv_h2 = TwoFloat::from(1.0) / (h_dd * h_dd);
    let inv_4h2 = inv_h2 / 4.0;
    let mut hessian = DMatrix::from_element(dim, dim, ZERO);
    for k in 0..dim {
        let second = plus[k] + minus[k] - f0 - f0;
        hessian[(k, k)] = second.scale(inv_h2).to_c64();
        for l in (k + 1)..dim {
            let pp = ev.eval(&[(k, h), (l, h)]);
            let pm = ev.eval(&[(k, h), (l, -h)]);
            let mp = ev.eval(&[(k, -h), (l, h)]);
            let mm = ev.eval(&[(k, -h), (l, -h)]);
            let mixed = (pp - pm - mp + mm).scale(inv_4h2).to_c64();
            hessian[(k, l)] = mixed;
            hessian[(l, k)] = mixed;
        }
    }
    Ok(RealJet {
        f: f0.to_c64(),
        grad_q: DVector::from_column_slice(&grad[..n]),
        grad_s: DVector::from_column_slice(&grad[n..]),
        hessian,
    })
}

/// Finite-difference estimate of the jet of `f_A` at `psi`, converted to the
/// `(z, z̄)` basis and projected onto the tangent space of the base.
///
/// Agrees with [`ncvalue`](super::ncvalue) to `O(h²)`; `h` must lie in
/// `[1e-8, 1e-3]`.
pub fn finite_difference_jet(a: &Operator, psi: &ProjectiveState, h: f64) -> Result<NCValue> {
    let real = finite_difference_real_jet(a, psi, h)?;
    let n = psi.dim();
    let i = C64::new(0.0, 1.0);
    let half = 0.5;
    // ∂/∂z = (∂_q - i ∂_s)/2, ∂/∂z̄ = (∂_q + i ∂_s)/2
    let grad_z = DVector::from_fn(n, |k, _| (real.grad_q[k] - i * real.grad_s[k]) * half);
    let grad_zbar = DVector::from_fn(n, |k, _| (real.grad_q[k] + i * real.grad_s[k]) * half);
    let hr = &real.hessian;
    let hess = DMatrix::from_fn(n, n, |a, b| {
        let qq = hr[(a, b)];
        let ss = hr[(n + a, n + b)];
        let qs = hr[(a, n + b)];
        let sq = hr[(n + a, b)];
        (qq + ss + i * (sq - qs)) * 0.25
    });

    let z = psi.amplitudes();
    let q = complement_projector(z);
    let grad_zbar = &q * grad_zbar;
    let grad_z = q.transpose() * grad_z;
    let hess = &q * hess * &q;
    NCValue::new(psi.clone(), real.f, grad_z, grad_zbar, hess)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::MaxModulus;
    use crate::ncgeom::ncvalue;

    #[test]
    fn step_range_enforced() {
        let a = Operator::identity(2);
        let psi = ProjectiveState::basis(2, 0);
        assert!(matches!(
            finite_difference_jet(&a, &psi, 1e-9),
            Err(Error::StepOutOfRange(_))
        ));
        assert!(finite_difference_jet(&a, &psi, 2e-3).is_err());
        assert!(finite_difference_jet(&a, &psi, 1e-3).is_ok());
    }

    #[test]
    fn identity_gives_exact_zero_jet() {
        let psi = ProjectiveState::from_slice(&[C64::new(0.3, 0.1), C64::new(-0.2, 0.7)]).unwrap();
        for h in [1e-8, 1e-5, 1e-3] {
            let v = finite_difference_jet(&Operator::identity(2), &psi, h).unwrap();
            assert_eq!(v.f(), C64::new(1.0, 0.0));
            assert_eq!(v.grad_z().max_modulus(), 0.0);
            assert_eq!(v.grad_zbar().max_modulus(), 0.0);
            assert_eq!(v.hess().max_modulus(), 0.0);
        }
    }

    #[test]
    fn sigma_z_matches_closed_form() {
        let a = Operator::diagonal(&[1.0, -1.0]);
        let psi = ProjectiveState::basis(2, 0);
        let fd = finite_difference_jet(&a, &psi, 1e-5).unwrap();
        let exact = ncvalue(&a, &psi).unwrap();
        assert!(fd.max_component_diff(&exact) < 1e-8);
    }

    #[test]
    fn small_steps_are_not_rounding_limited() {
        let a = Operator::new(
            2,
            &[
                vec![C64::new(0.3, 0.2), C64::new(-1.1, 0.4)],
                vec![C64::new(0.5, -0.9), C64::new(0.7, 0.0)],
            ],
        )
        .unwrap();
        let psi = ProjectiveState::from_slice(&[C64::new(0.3, 0.1), C64::new(-0.2, 0.7)]).unwrap();
        let exact = ncvalue(&a, &psi).unwrap();
        let e5 = finite_difference_jet(&a, &psi, 1e-5)
            .unwrap()
            .max_component_diff(&exact);
        let e6 = finite_difference_jet(&a, &psi, 1e-6)
            .unwrap()
            .max_component_diff(&exact);
        assert!(e6 < 1e-11, "{e6}");
        assert!((e5 / e6 - 100.0).abs() < 5.0, "{}", e5 / e6);
    }
}
