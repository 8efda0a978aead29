use serde::{Deserialize, Serialize};

use super::{Piece, Weight};
use crate::error::{Error, Result};

/// Weight as written in a config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase", deny_unknown_fields)]
pub enum WeightLiteral {
    /// `c · t^alpha`
    Power { c: f64, alpha: f64 },
    /// `c · t^alpha · exp(-lambda·t)`
    #[serde(rename = "powerexp")]
    PowerExp { c: f64, alpha: f64, lambda: f64 },
    /// `c_i · t^alpha_i` on the `i`-th interval cut by `knots`.
    Piecewise { knots: Vec<f64>, segments: Vec<Segment> },
    /// Log-linear interpolation of samples.
    Table { t: Vec<f64>, y: Vec<f64> },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub c: f64,
    pub alpha: f64,
}

impl WeightLiteral {
    pub fn to_weight(&self) -> Result<Weight> {
        let check = |c: f64, alpha: f64| {
            if c.is_finite() && c >= 0.0 && alpha.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("weight needs finite c >= 0 and finite alpha, got c={c}, alpha={alpha}")))
            }
        };
        match self {
            Self::Power { c, alpha } => {
                check(*c, *alpha)?;
                Ok(Weight::power(*c, *alpha))
            }
            Self::PowerExp { c, alpha, lambda } => {
                check(*c, *alpha)?;
                if !lambda.is_finite() {
                    return Err(Error::Config(format!("lambda must be finite, got {lambda}")));
                }
                Ok(Weight::power_exp(*c, *alpha, *lambda))
            }
            Self::Piecewise { knots, segments } => {
                for s in segments {
                    check(s.c, s.alpha)?;
                }
                Weight::piecewise(knots.clone(), segments.iter().map(|s| Piece::power(s.c, s.alpha)).collect())
            }
            Self::Table { t, y } => Weight::from_table(t, y),
        }
    }
}

impl TryFrom<&WeightLiteral> for Weight {
    type Error = Error;
    fn try_from(lit: &WeightLiteral) -> Result<Weight> {
        lit.to_weight()
    }
}
