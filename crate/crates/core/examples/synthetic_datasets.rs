//! Regenerate the synthetic datasets under `data/synthetic/`.
//!
//! Usage: cargo run -p bic-entangle --example synthetic_datasets -- data/synthetic

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use bic_entangle::cdos::BicMode;
use bic_entangle::fitting::{
    standard_separations, synthetic_cdos, synthetic_purcell, SampleSeries,
};

const SEED: u64 = 20240611;
const NOISE: f64 = 0.01;
const A: f64 = 400e-9;
const R_SPHERE: f64 = 100e-9;

fn write(path: &Path, header: &str, column: &str, s: &SampleSeries) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for line in header.lines() {
        writeln!(w, "# {line}")?;
    }
    writeln!(w, "# unit: nm")?;
    writeln!(w, "{column}_nm,value")?;
    for (x, y) in s.x.iter().zip(&s.y) {
        writeln!(w, "{:e},{y:e}", x * 1e9)?;
    }
    w.flush()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| "data/synthetic".into());
    std::fs::create_dir_all(&dir)?;
    for (name, mode) in [
        ("md_finite", BicMode::md_finite()),
        ("ed_finite", BicMode::ed_finite()),
    ] {
        let d = standard_separations(&mode, 20.0, 10);
        let s = synthetic_cdos(&mode, &d, NOISE, SEED)?;
        let header = format!(
            "Gamma12/Gamma0 = F beta J0(k d) sum c_n cos(2 pi n d / a)\n\
             preset {name}: F = {}, beta = {}, k_res = {:e} rad/m\n\
             multiplicative Gaussian noise, relative sigma {NOISE}, ChaCha8 seed {SEED}",
            mode.purcell, mode.beta, mode.k_res
        );
        write(&dir.join(format!("{name}_cdos.csv")), &header, "d", &s)?;
    }
    for (name, amp, decay) in [("ed", 51.80, 16.05), ("md", 15.47, 16.97)] {
        let z: Vec<f64> = (1..=60).map(|i| R_SPHERE + i as f64 * 5e-9).collect();
        let s = synthetic_purcell(amp, decay, A, R_SPHERE, &z, NOISE, SEED)?;
        let header = format!(
            "Purcell height profile 1 + A exp(-B (z - R) / a), z from the sphere centre\n\
             A = {amp}, B = {decay}, a = 400 nm, R = 100 nm\n\
             multiplicative Gaussian noise, relative sigma {NOISE}, ChaCha8 seed {SEED}"
        );
        write(&dir.join(format!("{name}_purcell.csv")), &header, "z", &s)?;
    }
    Ok(())
}
