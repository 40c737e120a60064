use std::f64::consts::FRAC_PI_4;

use quadvortex::fockspace::{make_squeezed_input, SqueezeConfig};
use quadvortex::modeconverter::apply_rotation;
use quadvortex::quadfield::{eval_fock_field, eval_lg_superposition, GridSpec, LgOptions, OddNReading, RadialForm};
use quadvortex::vortexdetect::{detect_vortices, DetectionParams};

fn count(cfg: &SqueezeConfig, resolution: usize, opts: LgOptions) -> usize {
    let f = eval_lg_superposition(cfg, &GridSpec::new(6.0, resolution).unwrap(), opts).unwrap();
    detect_vortices(&f, &DetectionParams::default()).unwrap().count
}

#[test]
fn counts_do_not_depend_on_resolution() {
    let variants = [
        LgOptions::default(),
        LgOptions {
            odd_n: OddNReading::HalfInteger,
            radial: RadialForm::Bare,
        },
    ];
    for opts in variants {
        for &r in &[0.02, 1.0] {
            for n in 1..=8 {
                let cfg = SqueezeConfig::new(n, r, FRAC_PI_4).unwrap();
                assert_eq!(count(&cfg, 512, opts), count(&cfg, 768, opts), "N={n} r={r} {opts:?}");
            }
        }
    }
}

#[test]
fn grid_norm_converges() {
    for &r in &[0.5, 1.0] {
        for n in 0..=8 {
            let cfg = SqueezeConfig::new(n, r, FRAC_PI_4).unwrap();
            let input = make_squeezed_input(&cfg);
            let rotated = apply_rotation(&input, cfg.phi).unwrap();
            for s in [&input, &rotated] {
                let coarse = eval_fock_field(s, &GridSpec::new(6.0, 256).unwrap()).unwrap().grid_norm_sqr();
                let fine = eval_fock_field(s, &GridSpec::new(6.0, 512).unwrap()).unwrap().grid_norm_sqr();
                assert!((coarse - fine).abs() < 1e-4, "N={n} r={r}: {coarse} vs {fine}");
            }
        }
    }
}
