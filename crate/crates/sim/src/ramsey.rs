//! Parameter arithmetic for the Ramsey-based speedups in the VOLUME model
//! and on oriented grids. Only the numbers are computed; no clique search.

use std::fmt;

use lcl_core::arith::{log2_big, log_star};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Values above this many bits stay symbolic as `base^exp`.
pub const MATERIALIZE_BITS: u64 = 1 << 20;

/// `base^exp`, materialized when small enough.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Power {
    pub base: BigUint,
    pub exp: BigUint,
    pub value: Option<BigUint>,
}

impl Power {
    pub fn new(base: BigUint, exp: BigUint) -> Power {
        let value = if base.is_zero() || base.is_one() || exp.is_zero() {
            Some(if base.is_zero() && !exp.is_zero() {
                BigUint::zero()
            } else {
                BigUint::one()
            })
        } else {
            let bits = base.bits() as f64 * exp.to_f64().unwrap_or(f64::INFINITY);
            if bits <= MATERIALIZE_BITS as f64 {
                Some(base.pow(exp.to_u32().expect("small exponent")))
            } else {
                None
            }
        };
        Power { base, exp, value }
    }

    /// `log*` of the value. Exact when materialized; otherwise computed from
    /// integer bounds on `log2` and exact whenever those bounds agree, which
    /// is reported by the second component.
    pub fn log_star(&self) -> (u32, bool) {
        if let Some(v) = &self.value {
            return (log_star(v), true);
        }
        // ceil(log2(b^e)) lies in [e*floor(log2 b), e*ceil(log2 b)].
        let lo_bits = BigUint::from(self.base.bits() - 1);
        let hi_bits = if self.base.count_ones() == 1 { lo_bits.clone() } else { lo_bits.clone() + 1u32 };
        let lo = 1 + log_star(&(&self.exp * lo_bits));
        let hi = 1 + log_star(&(&self.exp * hi_bits));
        (hi, lo == hi)
    }

    pub fn log2(&self) -> f64 {
        log2_big(&self.base) * self.exp.to_f64().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for Power {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            Some(v) if v.bits() <= 256 => write!(f, "{v}"),
            _ => write!(f, "{}^{}", self.base, self.exp),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamseyParams {
    pub p: BigUint,
    pub m: BigUint,
    pub z: Power,
    pub c: Power,
}

impl RamseyParams {
    /// `(log* m + log* c, p)`, the comparison the speedup argument needs to
    /// come out with the left side smaller.
    pub fn comparison(&self) -> (u32, BigUint) {
        (log_star(&self.m) + self.c.log_star().0, self.p.clone())
    }

    pub fn report(&self) -> String {
        let (lhs, p) = self.comparison();
        format!(
            "p: {}\nm: {}\nz: {}\nc: {}\nlog_star_p: {}\nlog_star_m: {}\nlog_star_z: {}\nlog_star_c: {}\nlog_star_m_plus_log_star_c: {lhs}\nbelow_p: {}\n",
            self.p,
            self.m,
            self.z,
            self.c,
            log_star(&self.p),
            log_star(&self.m),
            self.z.log_star().0,
            self.c.log_star().0,
            BigUint::from(lhs) < p
        )
    }
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

fn materialized(p: &Power) -> BigUint {
    p.value.clone().expect("z is materialized for supported parameters")
}

/// `p = τ+1`, `m = p·Δ^{r+1}`, `z = p!·p!·2^{C(p,2)}·(Δ!·|Σin|)^p`,
/// `c = (|Σout|+1)^z`.
pub fn ramsey_params_volume(tau: u64, delta: u64, r: u64, n_in: u64, n_out: u64) -> RamseyParams {
    let p = tau + 1;
    let m = BigUint::from(p) * BigUint::from(delta).pow((r + 1) as u32);
    let fp = factorial(p);
    let z_val = &fp * &fp
        * (BigUint::one() << (p * (p - 1) / 2))
        * (factorial(delta) * n_in).pow(p as u32);
    let z = Power::new(z_val.clone(), BigUint::one());
    let c = Power::new(BigUint::from(n_out + 1), materialized(&z));
    RamseyParams { p: p.into(), m, z, c }
}

/// `p = d(2t+1)`, `m = d(2(t+r)+1)`, `z = |Σin|^{2d(2t+1)^d}`,
/// `c = |Σout|^{d·p!·z}`.
pub fn ramsey_params_grid(t: u64, d: u64, r: u64, n_in: u64, n_out: u64) -> RamseyParams {
    let p = d * (2 * t + 1);
    let m = d * (2 * (t + r) + 1);
    let z_exp = BigUint::from(2 * d) * BigUint::from(2 * t + 1).pow(d as u32);
    let z = Power::new(n_in.into(), z_exp);
    let c_exp = BigUint::from(d) * factorial(p) * materialized(&z);
    let c = Power::new(n_out.into(), c_exp);
    RamseyParams { p: p.into(), m: m.into(), z, c }
}
