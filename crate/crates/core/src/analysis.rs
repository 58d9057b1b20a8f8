//! Quantitative analysis: evaluation-setup uncertainty, synchronization
//! budgets, alignment metrics, and battery-runtime arithmetic.

use serde::Serialize;

use crate::ltc::FrameRate;

/// Display/exposure timing of the reference-clock evaluation setup.
#[derive(Debug, Clone, Copy)]
pub struct EvalSetup {
    /// Display refresh period, seconds.
    pub t_disp_s: f64,
    /// Camera exposure time, seconds.
    pub t_exp_s: f64,
}

/// Expected RMS timing uncertainty of the evaluation setup,
/// `sqrt((T_disp/sqrt(12))^2 + (T_exp/sqrt(12))^2)`, treating both error
/// sources as uniformly distributed.
pub fn rms_uncertainty(setup: &EvalSetup) -> f64 {
    assert!(setup.t_disp_s >= 0.0 && setup.t_exp_s >= 0.0);
    ((setup.t_disp_s.powi(2) + setup.t_exp_s.powi(2)) / 12.0).sqrt()
}

/// Inputs of the synchronization budget.
#[derive(Debug, Clone, Copy)]
pub struct SyncBudgetInput {
    /// Fixed computation latency, seconds.
    pub t_calc_s: f64,
    /// Worst-case per-frame discretization deviation, seconds.
    pub eps_frame_s: f64,
    pub rate: FrameRate,
    /// Oscillator frequency error magnitude, parts per million.
    pub delta_ppm: f64,
}

/// Upper bound on uninterrupted synchronization time: the instant at which
/// accumulated timing error reaches half a frame period,
/// `t_max = (t_half - t_calc) / (eps_frame * fps + delta_ppm * 1e-6)`.
///
/// Returns `f64::INFINITY` when the error accumulation rate is zero.
///
/// ```
/// use ltcforge::analysis::{sync_budget, SyncBudgetInput};
/// use ltcforge::ltc::FrameRate;
///
/// // 16 MHz discretization residual at 30 fps, 30 ppm crystal
/// let t_max = sync_budget(&SyncBudgetInput {
///     t_calc_s: 37.5e-6,
///     eps_frame_s: 62.5e-9 / 3.0,
///     rate: FrameRate::Fps30,
///     delta_ppm: 30.0,
/// });
/// assert!((t_max - 543.0).abs() < 0.1);
/// ```
pub fn sync_budget(input: &SyncBudgetInput) -> f64 {
    assert!(input.eps_frame_s >= 0.0);
    assert!(input.delta_ppm >= 0.0);
    let t_half = input.rate.half_frame_s();
    assert!(
        input.t_calc_s >= 0.0 && input.t_calc_s < t_half,
        "t_calc must be below half a frame period"
    );
    let denom = input.eps_frame_s * f64::from(input.rate.fps()) + input.delta_ppm * 1e-6;
    if denom == 0.0 {
        return f64::INFINITY;
    }
    (t_half - input.t_calc_s) / denom
}

/// Timestamp-alignment metrics over a set of (LTC time, reference time)
/// pairs. `mae_s` and `std_s` are labeled distinctly: the first is the mean
/// absolute error, the second the sample standard deviation of the signed
/// errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlignmentReport {
    pub n: usize,
    pub mean_s: f64,
    pub mae_s: f64,
    pub std_s: f64,
    pub max_ae_s: f64,
    /// Frame shift margin: half a frame period minus the maximum absolute
    /// error. Positive means no frame-index ambiguity.
    pub fsm_s: f64,
    pub half_frame_s: f64,
}

impl AlignmentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        format!(
            "n,mean_s,mae_s,std_s,max_ae_s,fsm_s,half_frame_s\n{},{:e},{:e},{:e},{:e},{:e},{:e}\n",
            self.n, self.mean_s, self.mae_s, self.std_s, self.max_ae_s, self.fsm_s, self.half_frame_s
        )
    }
}

/// Computes alignment metrics for per-frame errors `e_i = ltc_i - reference_i`.
pub fn alignment_metrics(pairs: &[(f64, f64)], rate: FrameRate) -> AlignmentReport {
    assert!(!pairs.is_empty(), "alignment_metrics requires n >= 1");
    let n = pairs.len();
    let errors: Vec<f64> = pairs.iter().map(|&(ltc, reference)| ltc - reference).collect();
    let mean = errors.iter().sum::<f64>() / n as f64;
    let mae = errors.iter().map(|e| e.abs()).sum::<f64>() / n as f64;
    let max_ae = errors.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let std = if n > 1 {
        (errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let half_frame = rate.half_frame_s();
    AlignmentReport {
        n,
        mean_s: mean,
        mae_s: mae,
        std_s: std,
        max_ae_s: max_ae,
        fsm_s: half_frame - max_ae,
        half_frame_s: half_frame,
    }
}

/// Component power draws and battery parameters.
#[derive(Debug, Clone)]
pub struct PowerBudget {
    /// Per-component draw at the regulated system voltage, milliwatts.
    pub loads_mw: Vec<f64>,
    /// Battery capacity, milliamp-hours.
    pub capacity_mah: f64,
    /// Battery voltage, volts.
    pub battery_voltage_v: f64,
    /// Buck-converter efficiency, fraction of 1.
    pub converter_efficiency: f64,
}

impl PowerBudget {
    pub fn total_load_mw(&self) -> f64 {
        self.loads_mw.iter().sum()
    }

    /// Average current drawn from the battery, milliamps.
    pub fn battery_current_ma(&self) -> f64 {
        assert!(self.battery_voltage_v > 0.0);
        assert!(self.converter_efficiency > 0.0 && self.converter_efficiency <= 1.0);
        self.total_load_mw() / (self.converter_efficiency * self.battery_voltage_v)
    }
}

/// Battery runtime in hours; `f64::INFINITY` for zero load.
pub fn battery_runtime(budget: &PowerBudget) -> f64 {
    assert!(budget.capacity_mah > 0.0);
    let current = budget.battery_current_ma();
    if current == 0.0 {
        return f64::INFINITY;
    }
    budget.capacity_mah / current
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rms_uncertainty_closed_form() {
        let sigma = rms_uncertainty(&EvalSetup {
            t_disp_s: 1.0 / 60.0,
            t_exp_s: 1.0 / 60.0,
        });
        assert!((sigma - 6.8e-3).abs() < 0.05e-3, "sigma = {sigma}");

        // single-term degeneration
        let one = rms_uncertainty(&EvalSetup {
            t_disp_s: 1.0 / 60.0,
            t_exp_s: 0.0,
        });
        assert!((one - (1.0 / 60.0) / 12f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rms_uncertainty_symmetric_and_monotone() {
        let s = |a, b| rms_uncertainty(&EvalSetup { t_disp_s: a, t_exp_s: b });
        assert_eq!(s(0.01, 0.02), s(0.02, 0.01));
        assert!(s(0.02, 0.02) > s(0.01, 0.02));
        assert!(s(0.01, 0.03) > s(0.01, 0.02));
    }

    #[test]
    fn sync_budget_known_point() {
        // eps from the 16 MHz discretization at 30 fps
        let t = sync_budget(&SyncBudgetInput {
            t_calc_s: 37.5e-6,
            eps_frame_s: 62.5e-9 / 3.0,
            rate: FrameRate::Fps30,
            delta_ppm: 30.0,
        });
        assert!((t - 543.0).abs() < 0.1, "t_max = {t}");
    }

    #[test]
    fn sync_budget_perfect_clock_is_unbounded() {
        let t = sync_budget(&SyncBudgetInput {
            t_calc_s: 0.0,
            eps_frame_s: 0.0,
            rate: FrameRate::Fps25,
            delta_ppm: 0.0,
        });
        assert!(t.is_infinite());
    }

    #[test]
    fn sync_budget_monotone_and_scaling() {
        let base = SyncBudgetInput {
            t_calc_s: 37.5e-6,
            eps_frame_s: 62.5e-9 / 3.0,
            rate: FrameRate::Fps30,
            delta_ppm: 30.0,
        };
        let t0 = sync_budget(&base);
        assert!(sync_budget(&SyncBudgetInput { delta_ppm: 31.0, ..base }) < t0);
        assert!(sync_budget(&SyncBudgetInput { eps_frame_s: 30e-9, ..base }) < t0);
        assert!(sync_budget(&SyncBudgetInput { t_calc_s: 50e-6, ..base }) < t0);

        // scaling both accumulation terms by c scales t_max by 1/c
        let doubled = sync_budget(&SyncBudgetInput {
            eps_frame_s: base.eps_frame_s * 2.0,
            delta_ppm: base.delta_ppm * 2.0,
            ..base
        });
        assert!((doubled - t0 / 2.0).abs() / t0 < 1e-12);
    }

    #[test]
    fn alignment_metrics_trivial_cases() {
        let zeros: Vec<(f64, f64)> = (0..30).map(|i| (i as f64, i as f64)).collect();
        let r = alignment_metrics(&zeros, FrameRate::Fps30);
        assert_eq!(r.mean_s, 0.0);
        assert_eq!(r.mae_s, 0.0);
        assert_eq!(r.fsm_s, r.half_frame_s);

        let pair = [(1.0 + 1e-3, 1.0), (2.0 - 1e-3, 2.0)];
        let r = alignment_metrics(&pair, FrameRate::Fps25);
        assert!(r.mean_s.abs() < 1e-15);
        assert!((r.mae_s - 1e-3).abs() < 1e-12);
        assert!((r.max_ae_s - 1e-3).abs() < 1e-12);
    }

    #[test]
    fn alignment_metrics_invariants_on_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let pairs: Vec<(f64, f64)> = (0..30)
                .map(|i| {
                    let t = i as f64 / 30.0;
                    (t + rng.random_range(-8e-3..8e-3), t)
                })
                .collect();
            let r = alignment_metrics(&pairs, FrameRate::Fps30);
            assert!(r.mae_s <= r.max_ae_s);
            assert!(r.mean_s.abs() <= r.mae_s);
            assert_eq!(r.fsm_s + r.max_ae_s, r.half_frame_s);
        }
    }

    #[test]
    fn report_serialization_keys() {
        let r = alignment_metrics(&[(0.0, 0.0)], FrameRate::Fps24);
        let json = r.to_json();
        for key in ["n", "mean_s", "mae_s", "std_s", "max_ae_s", "fsm_s", "half_frame_s"] {
            assert!(json.contains(key), "missing {key} in {json}");
        }
        assert!(r.to_csv().starts_with("n,mean_s"));
    }

    #[test]
    fn battery_known_point() {
        let budget = PowerBudget {
            loads_mw: vec![30.92, 3.74, 0.7308, 0.02652],
            capacity_mah: 1000.0,
            battery_voltage_v: 3.0,
            converter_efficiency: 0.915,
        };
        assert!((budget.total_load_mw() - 35.42).abs() < 0.06);
        let current = budget.battery_current_ma();
        assert!((current - 12.88).abs() < 0.05, "current = {current}");
        let runtime = battery_runtime(&budget);
        assert!((runtime - 77.6).abs() < 0.3, "runtime = {runtime}");
    }

    #[test]
    fn zero_load_runs_forever() {
        let budget = PowerBudget {
            loads_mw: vec![],
            capacity_mah: 1000.0,
            battery_voltage_v: 3.0,
            converter_efficiency: 0.915,
        };
        assert!(battery_runtime(&budget).is_infinite());
    }
}
