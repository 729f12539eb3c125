//! Failure-probability bookkeeping for one randomized speedup step, in
//! base-2 log space.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

#[derive(Clone, Debug, PartialEq)]
pub struct FailureBudget {
    pub delta: u32,
    pub horizon: u32,
    pub n_in: u64,
    pub n_out: u64,
    pub n_out_re: u64,
    /// `Δ^T`, exact.
    pub delta_pow_t: BigUint,
    /// `log2 Y = Δ^T · log2 |Σin|`.
    pub log2_y: f64,
    pub log2_p: f64,
    pub log2_p1: f64,
    pub log2_p2: f64,
}

/// `log2` of `2 · (Δ·s·Y)^{Δ/(Δ+1)} · q^{1/(Δ+1)}`.
pub fn step_log2(delta: u32, s: u64, log2_y: f64, log2_q: f64) -> f64 {
    let d = delta as f64;
    1.0 + d / (d + 1.0) * (d.log2() + (s as f64).log2() + log2_y) + log2_q / (d + 1.0)
}

pub fn failure_budget(delta: u32, horizon: u32, n_in: u64, n_out: u64, n_out_re: u64, log2_p: f64) -> FailureBudget {
    let delta_pow_t = BigUint::from(delta).pow(horizon);
    let log2_y = if n_in == 1 { 0.0 } else { delta_pow_t.to_f64().unwrap_or(f64::INFINITY) * (n_in as f64).log2() };
    let log2_p1 = step_log2(delta, n_out, log2_y, log2_p);
    let log2_p2 = step_log2(delta, n_out_re, log2_y, log2_p1);
    FailureBudget {
        delta,
        horizon,
        n_in,
        n_out,
        n_out_re,
        delta_pow_t,
        log2_y,
        log2_p,
        log2_p1,
        log2_p2,
    }
}

impl FailureBudget {
    /// `Y` itself when it has at most `max_bits` bits.
    pub fn y(&self, max_bits: u64) -> Option<BigUint> {
        let e = u32::try_from(&self.delta_pow_t).ok()?;
        let bits = (self.n_in as f64).log2() * e as f64;
        (bits <= max_bits as f64).then(|| BigUint::from(self.n_in).pow(e))
    }

    pub fn p2_trivial(&self) -> bool {
        self.log2_p2 >= 0.0
    }

    /// The two side conditions at `n`: `|Σout| ≤ log log n` and
    /// `p'' ≤ 1 / log n`.
    pub fn side_conditions(&self, n: f64) -> (bool, bool) {
        let log_n = n.log2();
        ((self.n_out as f64) <= log_n.log2(), self.log2_p2 <= -log_n.log2())
    }

    pub fn report(&self, n: Option<f64>) -> String {
        let y = self.y(256).map_or_else(|| format!("2^{:.9}", self.log2_y), |y| y.to_string());
        let mut s = format!(
            "delta: {}\nT: {}\nsigma_in: {}\nsigma_out: {}\nsigma_out_re: {}\ndelta_pow_T: {}\nlog2_Y: {:.9}\nY: {y}\nlog2_p: {:.9}\nlog2_p1: {:.9}\nlog2_p2: {:.9}\np2_trivial: {}\n",
            self.delta,
            self.horizon,
            self.n_in,
            self.n_out,
            self.n_out_re,
            self.delta_pow_t,
            self.log2_y,
            self.log2_p,
            self.log2_p1,
            self.log2_p2,
            self.p2_trivial()
        );
        if let Some(n) = n {
            let (a, b) = self.side_conditions(n);
            s += &format!("n: {n}\nsigma_out_le_loglog_n: {a}\np2_le_inv_log_n: {b}\n");
        }
        s
    }
}
