//! Privacy budgets and the spend ledger.
//!
//! Budgets are handed to mechanisms as `f64`, but the ledger accumulates
//! spends as exact rationals. A float such as `0.1` enters the ledger as the
//! decimal it prints as (1/10), and per-iteration splits are exact divisions,
//! so `T` spends of `rho / T` sum back to exactly `rho`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrivacyFlavor {
    /// `(epsilon, 0)`-DP.
    Pure,
    /// `(epsilon, delta)`-DP with `delta > 0`.
    Approx,
    /// `rho`-zero-concentrated DP.
    Zcdp,
}

/// A privacy guarantee a mechanism is asked to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrivacyBudget {
    flavor: PrivacyFlavor,
    epsilon: f64,
    delta: f64,
    rho: f64,
}

impl PrivacyBudget {
    pub fn pure(epsilon: f64) -> Result<Self> {
        check_nonneg("epsilon", epsilon)?;
        Ok(Self {
            flavor: PrivacyFlavor::Pure,
            epsilon,
            delta: 0.0,
            rho: 0.0,
        })
    }

    pub fn approx(epsilon: f64, delta: f64) -> Result<Self> {
        check_nonneg("epsilon", epsilon)?;
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::InvalidBudget(format!(
                "approximate DP needs delta in (0, 1], got {delta}"
            )));
        }
        Ok(Self {
            flavor: PrivacyFlavor::Approx,
            epsilon,
            delta,
            rho: 0.0,
        })
    }

    pub fn zcdp(rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidBudget(format!("zCDP needs rho > 0, got {rho}")));
        }
        Ok(Self {
            flavor: PrivacyFlavor::Zcdp,
            epsilon: 0.0,
            delta: 0.0,
            rho,
        })
    }

    pub fn flavor(&self) -> PrivacyFlavor {
        self.flavor
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// The ledger amount this budget corresponds to.
    pub fn to_spend(&self) -> Spend {
        Spend::new(self.epsilon, self.delta, self.rho)
            .expect("budget fields are validated on construction")
    }
}

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidBudget(format!("{name} must be finite and >= 0, got {v}")))
    }
}

/// An exact amount of privacy loss in each accounting dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spend {
    epsilon: BigRational,
    delta: BigRational,
    rho: BigRational,
}

impl Spend {
    pub fn zero() -> Self {
        Self {
            epsilon: BigRational::zero(),
            delta: BigRational::zero(),
            rho: BigRational::zero(),
        }
    }

    /// Amount from floats, each read as its shortest round-trip decimal.
    pub fn new(epsilon: f64, delta: f64, rho: f64) -> Result<Self> {
        Ok(Self {
            epsilon: decimal_rational("epsilon", epsilon)?,
            delta: decimal_rational("delta", delta)?,
            rho: decimal_rational("rho", rho)?,
        })
    }

    pub fn epsilon(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, 0.0, 0.0)
    }

    pub fn rho(rho: f64) -> Result<Self> {
        Self::new(0.0, 0.0, rho)
    }

    /// Amount from exact rationals.
    pub fn from_rationals(epsilon: BigRational, delta: BigRational, rho: BigRational) -> Result<Self> {
        if epsilon.is_negative() || delta.is_negative() || rho.is_negative() {
            return Err(Error::InvalidBudget("spend amounts must be non-negative".into()));
        }
        Ok(Self {
            epsilon,
            delta,
            rho,
        })
    }

    /// Splits into `parts` equal shares (exactly).
    pub fn split(&self, parts: u64) -> Self {
        assert!(parts > 0, "cannot split a spend into zero parts");
        let d = BigRational::from_integer(BigInt::from(parts));
        Self {
            epsilon: &self.epsilon / &d,
            delta: &self.delta / &d,
            rho: &self.rho / &d,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.epsilon.is_zero() && self.delta.is_zero() && self.rho.is_zero()
    }

    pub fn epsilon_exact(&self) -> &BigRational {
        &self.epsilon
    }

    pub fn delta_exact(&self) -> &BigRational {
        &self.delta
    }

    pub fn rho_exact(&self) -> &BigRational {
        &self.rho
    }

    pub fn epsilon_f64(&self) -> f64 {
        self.epsilon.to_f64().unwrap_or(f64::NAN)
    }

    pub fn delta_f64(&self) -> f64 {
        self.delta.to_f64().unwrap_or(f64::NAN)
    }

    pub fn rho_f64(&self) -> f64 {
        self.rho.to_f64().unwrap_or(f64::NAN)
    }

    fn add(&self, other: &Spend) -> Spend {
        Spend {
            epsilon: &self.epsilon + &other.epsilon,
            delta: &self.delta + &other.delta,
            rho: &self.rho + &other.rho,
        }
    }

    /// First dimension in which `self` exceeds `limit`, if any.
    fn exceeds(&self, limit: &Spend) -> Option<&'static str> {
        if self.epsilon > limit.epsilon {
            Some("epsilon")
        } else if self.delta > limit.delta {
            Some("delta")
        } else if self.rho > limit.rho {
            Some("rho")
        } else {
            None
        }
    }
}

impl fmt::Display for Spend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(epsilon={}, delta={}, rho={})", self.epsilon, self.delta, self.rho)
    }
}

impl Serialize for Spend {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            epsilon: f64,
            delta: f64,
            rho: f64,
            epsilon_exact: String,
            delta_exact: String,
            rho_exact: String,
        }
        Repr {
            epsilon: self.epsilon_f64(),
            delta: self.delta_f64(),
            rho: self.rho_f64(),
            epsilon_exact: self.epsilon.to_string(),
            delta_exact: self.delta.to_string(),
            rho_exact: self.rho.to_string(),
        }
        .serialize(serializer)
    }
}

fn decimal_rational(name: &str, v: f64) -> Result<BigRational> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::InvalidBudget(format!("{name} must be finite and >= 0, got {v}")));
    }
    if v == 0.0 {
        return Ok(BigRational::zero());
    }
    // `{:e}` prints the shortest decimal that round-trips, e.g. "3.3333333333333335e-1".
    let repr = format!("{v:e}");
    let (mantissa, exponent) = repr.split_once('e').expect("`{:e}` always has an exponent");
    let exponent: i64 = exponent.parse().expect("`{:e}` exponent is an integer");
    let frac_digits = mantissa.split_once('.').map_or(0, |(_, frac)| frac.len()) as i64;
    let digits: BigInt = mantissa.replace('.', "").parse().expect("mantissa digits");
    let shift = exponent - frac_digits;
    let ten = BigInt::from(10u8);
    let scale = num_traits::pow(ten, shift.unsigned_abs() as usize);
    Ok(if shift >= 0 {
        BigRational::from_integer(digits * scale)
    } else {
        BigRational::new(digits, scale)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub mechanism: String,
    pub spend: Spend,
}

impl LedgerEntry {
    pub fn new(mechanism: impl Into<String>, spend: Spend) -> Self {
        Self {
            mechanism: mechanism.into(),
            spend,
        }
    }
}

/// Basic-composition accounting against a fixed total.
///
/// Updates are functional: [`BudgetLedger::spend`] returns a new ledger and
/// leaves the receiver untouched.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetLedger {
    total: Spend,
    entries: Vec<LedgerEntry>,
    spent: Spend,
}

impl BudgetLedger {
    pub fn new(total: &PrivacyBudget) -> Self {
        Self::with_total(total.to_spend())
    }

    pub fn with_total(total: Spend) -> Self {
        Self {
            total,
            entries: Vec::new(),
            spent: Spend::zero(),
        }
    }

    pub fn spend(&self, mechanism: &str, amount: Spend) -> Result<Self> {
        let spent = self.spent.add(&amount);
        if let Some(dim) = spent.exceeds(&self.total) {
            return Err(Error::BudgetExceeded {
                mechanism: mechanism.to_string(),
                detail: format!("cumulative {dim} would be {spent}, total is {}", self.total),
            });
        }
        let mut entries = self.entries.clone();
        entries.push(LedgerEntry::new(mechanism, amount));
        Ok(Self {
            total: self.total.clone(),
            entries,
            spent,
        })
    }

    /// Applies a batch of entries in order.
    pub fn record(&self, entries: &[LedgerEntry]) -> Result<Self> {
        entries
            .iter()
            .try_fold(self.clone(), |ledger, e| ledger.spend(&e.mechanism, e.spend.clone()))
    }

    pub fn total(&self) -> &Spend {
        &self.total
    }

    pub fn spent(&self) -> &Spend {
        &self.spent
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    /// True when every dimension of the total has been used up exactly.
    pub fn is_exhausted(&self) -> bool {
        self.spent == self.total
    }
}
