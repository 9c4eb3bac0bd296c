//! Built-in figure configurations.

/// `(name, config text)`.
pub const PRESETS: &[(&str, &str)] = &[
    ("fig2", FIG2),
    ("fig3a", FIG3A),
    ("fig3b", FIG3B),
    ("fig4a", FIG4A),
    ("fig4b", FIG4B),
    ("fig5a", FIG5A),
    ("fig5b", FIG5B),
];

pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

const FIG2: &str = "\
figure.kind = steady_sweep
figure.title = Stationary concurrence, independent channel
model.channel = independent
control.phi1 = pi/2
sweep.parameter = mu1_over_gamma
sweep.start = 0
sweep.stop = 2
sweep.steps = 2000
run.mode = analytic
";

// r = 1/sqrt(5) is the optimal pair weight, 0.5 the largest reachable one.
const FIG3A: &str = "\
figure.kind = trajectories
figure.title = C(t), independent channel, maximally entangled start
model.channel = independent
control.phi1 = pi/2
initial.state = paper_rho01_s3
figure.r = 0.2, 0.4472135955, 0.5
run.t_max = 10
run.samples = 400
";

const FIG3B: &str = "\
figure.kind = trajectories
figure.title = C(t), independent channel, mixed start
model.channel = independent
control.phi1 = pi/2
initial.state = paper_rho02
figure.r = 0.2, 0.4472135955, 0.5
run.t_max = 10
run.samples = 400
";

const FIG4A: &str = "\
figure.kind = steady_sweep
figure.title = Stationary concurrence, collective channel, kappa = 0.85
model.channel = collective
control.phi1 = pi/2
initial.state = singlet_mix
initial.kappa = 0.85
sweep.parameter = mu1_over_gamma
sweep.start = 0
sweep.stop = 2
sweep.steps = 2000
run.mode = analytic
";

const FIG4B: &str = "\
figure.kind = steady_sweep
figure.title = Stationary concurrence, collective channel, kappa = 1
model.channel = collective
control.phi1 = pi/2
initial.state = ground
sweep.parameter = mu1_over_gamma
sweep.start = 0
sweep.stop = 2
sweep.steps = 2000
run.mode = analytic
";

// The middle r is kappa/sqrt(3), the largest reachable value (kappa = 7/8).
const FIG5A: &str = "\
figure.kind = trajectories
figure.title = C(t), collective channel, kappa = 7/8
model.channel = collective
control.phi1 = pi/2
initial.state = paper_rho01_s4
figure.r = 0.25, 0.505181485541, 0.45
run.t_max = 15
run.samples = 600
";

// kappa = 0.95; middle r = kappa/sqrt(3).
const FIG5B: &str = "\
figure.kind = trajectories
figure.title = C(t), collective channel, kappa = 0.95
model.channel = collective
control.phi1 = pi/2
initial.state = paper_rho02
figure.r = 0.25, 0.54848275573, 0.45
run.t_max = 15
run.samples = 600
";

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::{RawConfig, RunConfig};

    #[test]
    fn all_presets_parse() {
        for (name, text) in PRESETS {
            let raw = RawConfig::parse(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            RunConfig::from_raw(&raw).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn reachable_r_values_are_maxima() {
        assert!((0.4472135955f64 - 1.0 / 5f64.sqrt()).abs() < 1e-10);
        assert!((0.505181485541f64 - 0.875 / 3f64.sqrt()).abs() < 1e-12);
        assert!((0.54848275573f64 - 0.95 / 3f64.sqrt()).abs() < 1e-12);
    }
}
