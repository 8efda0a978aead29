//! Exponent pairs `(p, q)` and the regime labels criteria dispatch on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where `p` sits relative to 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Base {
    Below,
    One,
    Above,
}

/// Order of `p` and `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Order {
    /// `p <= q`
    PLeQ,
    /// `q < p`
    QLtP,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Regime {
    pub order: Order,
    pub base: Base,
}

impl Regime {
    /// Report label: `"p≤q"`, `"q<p"`, and `"1=p≤q"`, `"q<1=p"` when `p = 1`.
    pub fn label(&self) -> &'static str {
        match (self.order, self.base) {
            (Order::PLeQ, Base::One) => "1=p≤q",
            (Order::QLtP, Base::One) => "q<1=p",
            (Order::PLeQ, _) => "p≤q",
            (Order::QLtP, _) => "q<p",
        }
    }
}

/// Exponents `p, q` in `(0, inf]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub p: f64,
    pub q: f64,
}

impl Exponents {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        for (name, x) in [("p", p), ("q", q)] {
            if !(x > 0.0) {
                return Err(Error::Config(format!("{name} must lie in (0, inf], got {x}")));
            }
        }
        Ok(Self { p, q })
    }

    /// `p'` with `1/p + 1/p' = 1`, for `p >= 1`.
    pub fn p_prime(&self) -> Option<f64> {
        match self.p {
            p if p < 1.0 => None,
            p if p == 1.0 => Some(f64::INFINITY),
            p if p.is_infinite() => Some(1.0),
            p => Some(p / (p - 1.0)),
        }
    }

    /// `r` with `1/r = 1/q - 1/p`, for `q < p`.
    pub fn r(&self) -> Option<f64> {
        (self.q < self.p).then(|| 1.0 / (1.0 / self.q - 1.0 / self.p))
    }

    pub fn regime(&self) -> Regime {
        let order = if self.p <= self.q { Order::PLeQ } else { Order::QLtP };
        let base = if self.p < 1.0 {
            Base::Below
        } else if self.p == 1.0 {
            Base::One
        } else {
            Base::Above
        };
        Regime { order, base }
    }

    /// Both exponents finite, as every criterion requires.
    pub fn require_finite(&self) -> Result<()> {
        if self.p.is_finite() && self.q.is_finite() {
            Ok(())
        } else {
            Err(Error::Usage(format!("criteria need finite p and q, got p={}, q={}", self.p, self.q)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn derived_exponents() {
        let e = Exponents::new(2.0, 1.0).unwrap();
        assert_eq!(e.p_prime(), Some(2.0));
        assert_eq!(e.r(), Some(2.0));
        assert_eq!(e.regime().label(), "q<p");
        let e = Exponents::new(1.0, 3.0).unwrap();
        assert_eq!(e.p_prime(), Some(f64::INFINITY));
        assert_eq!(e.r(), None);
        assert_eq!(e.regime().label(), "1=p≤q");
        assert_eq!(Exponents::new(1.0, 0.5).unwrap().regime().label(), "q<1=p");
        assert_eq!(Exponents::new(0.5, 0.5).unwrap().p_prime(), None);
        assert!(Exponents::new(0.0, 1.0).is_err());
        assert_eq!(Exponents::new(f64::INFINITY, 1.0).unwrap().p_prime(), Some(1.0));
    }

    proptest! {
        #[test]
        fn regimes_are_exhaustive(p in 0.05f64..10.0, q in 0.05f64..10.0) {
            let e = Exponents::new(p, q).unwrap();
            let reg = e.regime();
            prop_assert_eq!(reg.order == Order::PLeQ, p <= q);
            prop_assert_eq!(e.r().is_some(), q < p);
            if let Some(pp) = e.p_prime() {
                prop_assert!((1.0 / p + 1.0 / pp - 1.0).abs() < 1e-12);
            }
            if let Some(r) = e.r() {
                prop_assert!((1.0 / r - (1.0 / q - 1.0 / p)).abs() < 1e-12);
            }
        }
    }
}
