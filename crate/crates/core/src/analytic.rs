//! Analytic outer kernels `h`, their Taylor polynomials and residual bounds.

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::polynomial::UNIT_TOL;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    /// `h(s) = ln(1 + s)` on `[0, 1]`.
    Log1p,
    /// `h(s) = s / (1 - s)` on `[0, s_bar]`, `s_bar < 1`.
    QueueDelay,
    /// `h(s) = s` on `[0, 1]`.
    Identity,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyticKernel<T> {
    kind: KernelKind,
    center: T,
    upper: T,
}

impl<T: Scalar> AnalyticKernel<T> {
    /// `ln(1 + s)` expanded around 1/2.
    pub fn log1p() -> Self {
        AnalyticKernel {
            kind: KernelKind::Log1p,
            center: T::lit(0.5),
            upper: T::one(),
        }
    }

    /// `ln(1 + s)` expanded around an arbitrary center in `[0, 1]`.
    pub fn log1p_centered(center: T) -> Result<Self> {
        if !(center >= T::zero() && center <= T::one()) {
            return input(format!("log1p center {center} must lie in [0, 1]"));
        }
        Ok(AnalyticKernel {
            kind: KernelKind::Log1p,
            center,
            upper: T::one(),
        })
    }

    /// `s / (1 - s)` expanded around 0, valid on `[0, s_bar]`.
    pub fn queue_delay(s_bar: T) -> Result<Self> {
        if !(s_bar >= T::zero()) {
            return input(format!("queue load bound {s_bar} must be non-negative"));
        }
        if s_bar >= T::one() {
            return Err(Error::Stability(s_bar.as_f64()));
        }
        Ok(AnalyticKernel {
            kind: KernelKind::QueueDelay,
            center: T::zero(),
            upper: s_bar,
        })
    }

    pub fn identity() -> Self {
        AnalyticKernel {
            kind: KernelKind::Identity,
            center: T::zero(),
            upper: T::one(),
        }
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn center(&self) -> T {
        self.center
    }

    pub fn domain(&self) -> (T, T) {
        (T::zero(), self.upper)
    }

    /// Load bound of a queue kernel.
    pub fn s_bar(&self) -> Option<T> {
        (self.kind == KernelKind::QueueDelay).then_some(self.upper)
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            KernelKind::Log1p => "log1p",
            KernelKind::QueueDelay => "queue",
            KernelKind::Identity => "identity",
        }
    }

    fn domain_error(&self, s: T) -> Error {
        Error::Domain {
            kernel: self.name(),
            value: s.as_f64(),
            lo: 0.0,
            hi: self.upper.as_f64(),
        }
    }

    /// Exact kernel value. Points within `1e-9` of the domain are accepted;
    /// a queue kernel always rejects `s >= 1`.
    pub fn eval(&self, s: T) -> Result<T> {
        let tol = T::lit(UNIT_TOL);
        if !(s >= -tol && s <= self.upper + tol) {
            return Err(self.domain_error(s));
        }
        Ok(match self.kind {
            KernelKind::Log1p => s.ln_1p(),
            KernelKind::QueueDelay => {
                if s >= T::one() {
                    return Err(self.domain_error(s));
                }
                s / (T::one() - s)
            }
            KernelKind::Identity => s,
        })
    }

    /// Degree-`degree` Taylor polynomial around the kernel's center.
    pub fn taylor(&self, degree: u32) -> Result<TaylorPolynomial<T>> {
        let c = self.center;
        let coefficients = match self.kind {
            KernelKind::Log1p => {
                // h^(l)(c) / l! = (-1)^(l+1) / (l (1+c)^l)
                let base = T::one() / (T::one() + c);
                let mut coeffs = vec![c.ln_1p()];
                let mut pow = T::one();
                for l in 1..=degree {
                    pow *= base;
                    let sign = if l % 2 == 1 { T::one() } else { -T::one() };
                    coeffs.push(sign * pow / T::lit(l as f64));
                }
                coeffs
            }
            KernelKind::QueueDelay => {
                if degree == 0 {
                    return input("the queue kernel expansion starts at degree 1");
                }
                let mut coeffs = vec![T::zero()];
                coeffs.extend(std::iter::repeat_n(T::one(), degree as usize));
                coeffs
            }
            KernelKind::Identity => vec![c, T::one()],
        };
        Ok(TaylorPolynomial {
            center: c,
            coefficients,
        })
    }

    /// Uniform bound on `|h(s) - taylor(degree)(s)|` over the kernel's domain.
    pub fn residual_bound(&self, degree: u32) -> T {
        let p = (degree + 1) as i32;
        match self.kind {
            KernelKind::Log1p => {
                // Lagrange form with |h^(L+1)(xi)| / (L+1)! <= 1 / (L+1) for xi >= 0
                let reach = self.center.max(T::one() - self.center);
                reach.powi(p) / T::lit(p as f64)
            }
            KernelKind::QueueDelay => self.upper.powi(p) / (T::one() - self.upper),
            KernelKind::Identity => T::zero(),
        }
    }
}

/// `sum_l a_l (s - center)^l`.
#[derive(Clone, Debug, PartialEq)]
pub struct TaylorPolynomial<T> {
    pub center: T,
    pub coefficients: Vec<T>,
}

impl<T: Scalar> TaylorPolynomial<T> {
    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn eval(&self, s: T) -> T {
        let u = s - self.center;
        self.coefficients
            .iter()
            .rev()
            .fold(T::zero(), |acc, &a| acc * u + a)
    }
}

/// Kernel description used in instance files.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelSpec {
    Log1p,
    Queue { s_bar: f64 },
    Identity,
}

impl KernelSpec {
    pub fn build<T: Scalar>(&self) -> Result<AnalyticKernel<T>> {
        match *self {
            KernelSpec::Log1p => Ok(AnalyticKernel::log1p()),
            KernelSpec::Queue { s_bar } => AnalyticKernel::queue_delay(T::lit(s_bar)),
            KernelSpec::Identity => Ok(AnalyticKernel::identity()),
        }
    }

    pub fn of<T: Scalar>(k: &AnalyticKernel<T>) -> Self {
        match k.kind() {
            KernelKind::Log1p => KernelSpec::Log1p,
            KernelKind::QueueDelay => KernelSpec::Queue {
                s_bar: k.upper.as_f64(),
            },
            KernelKind::Identity => KernelSpec::Identity,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kernel_values() {
        let log = AnalyticKernel::<f64>::log1p();
        assert_eq!(log.eval(0.0).unwrap(), 0.0);
        assert_relative_eq!(log.eval(1.0).unwrap(), std::f64::consts::LN_2);
        let q = AnalyticKernel::<f64>::queue_delay(0.9).unwrap();
        assert_relative_eq!(q.eval(0.5).unwrap(), 1.0);
        assert!(matches!(q.eval(0.95), Err(Error::Domain { .. })));
        assert!(matches!(log.eval(1.5), Err(Error::Domain { .. })));
        assert!(matches!(
            AnalyticKernel::<f64>::queue_delay(1.0),
            Err(Error::Stability(_))
        ));
    }

    #[test]
    fn taylor_coefficients() {
        let t = AnalyticKernel::<f64>::log1p().taylor(2).unwrap();
        assert_eq!(t.center, 0.5);
        assert_relative_eq!(t.coefficients[0], 1.5f64.ln());
        assert_relative_eq!(t.coefficients[1], 2.0 / 3.0);
        assert_relative_eq!(t.coefficients[2], -2.0 / 9.0);

        let q = AnalyticKernel::<f64>::queue_delay(0.5).unwrap();
        assert_eq!(q.taylor(3).unwrap().coefficients, vec![0.0, 1.0, 1.0, 1.0]);
        assert!(q.taylor(0).is_err());

        for k in [
            AnalyticKernel::<f64>::log1p(),
            AnalyticKernel::queue_delay(0.5).unwrap(),
            AnalyticKernel::identity(),
        ] {
            let t = k.taylor(3).unwrap();
            assert_relative_eq!(t.eval(k.center()), k.eval(k.center()).unwrap());
        }
    }

    #[test]
    fn taylor_evaluation() {
        let t = AnalyticKernel::<f64>::log1p().taylor(2).unwrap();
        assert_relative_eq!(t.eval(1.0), 0.683243, epsilon = 1e-6);
        let q = AnalyticKernel::<f64>::queue_delay(0.6)
            .unwrap()
            .taylor(2)
            .unwrap();
        assert_relative_eq!(q.eval(0.5), 0.75);
        let id = AnalyticKernel::<f64>::identity().taylor(1).unwrap();
        assert_relative_eq!(id.eval(0.37), 0.37);
    }

    #[test]
    fn residual_bounds() {
        let log = AnalyticKernel::<f64>::log1p();
        assert_relative_eq!(log.residual_bound(1), 0.125);
        assert_relative_eq!(log.residual_bound(3), 1.0 / 64.0);
        let q = AnalyticKernel::<f64>::queue_delay(0.5).unwrap();
        assert_relative_eq!(q.residual_bound(2), 0.25);
        assert_eq!(AnalyticKernel::<f64>::identity().residual_bound(4), 0.0);
        for l in 1..12 {
            assert!(log.residual_bound(l + 1) < log.residual_bound(l));
            assert!(q.residual_bound(l + 1) < q.residual_bound(l));
        }
    }

    #[test]
    fn off_center_log_bound_holds() {
        let k = AnalyticKernel::<f64>::log1p_centered(0.2).unwrap();
        for l in 1..6 {
            let t = k.taylor(l).unwrap();
            for i in 0..=200 {
                let s = i as f64 / 200.0;
                assert!((k.eval(s).unwrap() - t.eval(s)).abs() <= k.residual_bound(l));
            }
        }
    }

    #[test]
    fn kernel_spec_json() {
        let k: KernelSpec = serde_json::from_str(r#"{"kind":"queue","s_bar":0.9}"#).unwrap();
        assert_eq!(k, KernelSpec::Queue { s_bar: 0.9 });
        let k: KernelSpec = serde_json::from_str(r#"{"kind":"log1p"}"#).unwrap();
        assert_eq!(KernelSpec::of(&k.build::<f64>().unwrap()), KernelSpec::Log1p);
        assert_eq!(
            serde_json::to_string(&KernelSpec::Identity).unwrap(),
            r#"{"kind":"identity"}"#
        );
    }
}
