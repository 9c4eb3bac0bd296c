#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use entlab::entangle::XState;
use entlab::physmodel::{build_channel, ChannelKind, ChannelSpec, ControlParams};
use entlab::qmat::{ComplexMat4, DensityMatrix, C64};
use rand::Rng;

fn gauss<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller.
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (2.0 * PI * v).cos()
}

/// Ginibre-distributed full-rank density matrix.
pub fn random_density<R: Rng>(rng: &mut R) -> DensityMatrix {
    let mut g = ComplexMat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            g.0[i][j] = C64::new(gauss(rng), gauss(rng));
        }
    }
    let m = g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.hermitian_part().scale_re(1.0 / tr)).expect("Ginibre state is valid")
}

pub fn random_x_state<R: Rng>(rng: &mut R) -> XState {
    let mut p = [0.0; 4];
    for x in p.iter_mut() {
        *x = rng.gen_range(0.01..1.0);
    }
    let s: f64 = p.iter().sum();
    let [a, b, c, d] = p.map(|x| x / s);
    let w = C64::from_polar(rng.gen_range(0.0..0.999) * (a * d).sqrt(), rng.gen_range(-PI..PI));
    let z = C64::from_polar(rng.gen_range(0.0..0.999) * (b * c).sqrt(), rng.gen_range(-PI..PI));
    XState::new(a, b, c, d, w, z).expect("valid X-state")
}

pub fn random_ctrl<R: Rng>(rng: &mut R) -> ControlParams {
    ControlParams::new(
        rng.gen_range(0.0..2.0),
        rng.gen_range(-PI..PI),
        rng.gen_range(0.0..1.0),
        rng.gen_range(-PI..PI),
    )
    .unwrap()
}

pub fn independent() -> ChannelSpec {
    build_channel(ChannelKind::Independent, 1.0, None, None).unwrap()
}

pub fn collective(eta0: f64) -> ChannelSpec {
    build_channel(ChannelKind::Collective, 1.0, None, Some(eta0)).unwrap()
}

pub fn mixed(gamma12: f64, eta0: f64) -> ChannelSpec {
    build_channel(ChannelKind::Mixed, 1.0, Some(gamma12), Some(eta0)).unwrap()
}

/// Runs the `entlab` binary.
pub fn entlab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entlab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("spawn entlab")
}

/// Parses a CSV written by the binary into header and rows of raw cells.
pub fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let mut lines = text.lines();
    let header = lines.next().expect("header").split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (header, rows)
}

pub fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let j = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[j].parse().unwrap()).collect()
}
