//! Built-in experiment presets. Each preset expands to one or more labelled
//! configurations; `run` writes one CSV per configuration (the label is
//! appended to the output file stem).

use dnwr_core::ArrangementKind;

use crate::config::{ExperimentConfig, Initializer, Strips};

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    /// (label, config); the label is empty for single-configuration presets.
    pub configs: Vec<(String, ExperimentConfig)>,
}

fn base(arrangement: ArrangementKind) -> ExperimentConfig {
    ExperimentConfig {
        arrangement,
        mode: dnwr_core::Mode::Error,
        domain: (0.0, 5.0),
        strips: Strips::EqualCount(5),
        nu: 1.0,
        a1: 0.0,
        a2: 0.028,
        tau: 3.0,
        horizon: 10.0,
        dx: 0.1,
        dt: 0.2,
        thetas: vec![0.5],
        initializers: vec![Initializer::T2],
        tolerance: 1e-6,
        max_iterations: 100,
        output: None,
    }
}

fn long_window(arrangement: ArrangementKind) -> ExperimentConfig {
    base(arrangement)
}

fn short_window(arrangement: ArrangementKind) -> ExperimentConfig {
    ExperimentConfig {
        tau: 0.03,
        horizon: 0.1,
        dt: 0.001,
        ..base(arrangement)
    }
}

/// The T=1, tau=0.3 setting of the unequal-size and distinct-initializer
/// studies; dt = 0.01 is a reconstruction chosen so tau/dt = 30 is
/// integral.
fn unit_window(arrangement: ArrangementKind) -> ExperimentConfig {
    ExperimentConfig {
        tau: 0.3,
        horizon: 1.0,
        dt: 0.01,
        thetas: vec![0.3, 0.5, 0.7],
        ..base(arrangement)
    }
}

pub const UNEQUAL_SIZES: [f64; 5] = [1.5, 0.5, 1.0, 0.5, 1.5];

/// Equal strips on (0,5) with dx adjusted so every breakpoint lands on a
/// node: per-strip cell count round((5/S)/0.1).
fn subdomain_sweep_config(subdomains: usize, a1: f64) -> ExperimentConfig {
    let cells_per_strip = (5.0 / subdomains as f64 / 0.1).round();
    ExperimentConfig {
        strips: Strips::EqualCount(subdomains),
        dx: 5.0 / (subdomains as f64 * cells_per_strip),
        a1,
        ..short_window(ArrangementKind::CentralOutward)
    }
}

fn two_panel(build: impl Fn(f64) -> ExperimentConfig) -> Vec<(String, ExperimentConfig)> {
    [0.0, 1.0]
        .into_iter()
        .map(|a1| (format!("a1-{}", a1 as i64), build(a1)))
        .collect()
}

pub fn all() -> Vec<Preset> {
    let single = |config: ExperimentConfig| vec![(String::new(), config)];
    vec![
        Preset {
            name: "arr1-short",
            description: "sequential sweep, five equal strips on (0,5), error mode, \
                          T=0.1, tau=0.03, dx=0.1, dt=0.001, theta=0.5, h0=t^2",
            configs: single(short_window(ArrangementKind::Sweep)),
        },
        Preset {
            name: "arr1-long",
            description: "sequential sweep, five equal strips on (0,5), error mode, \
                          T=10, tau=3, dx=0.1, dt=0.2, theta=0.5, h0=t^2",
            configs: single(long_window(ArrangementKind::Sweep)),
        },
        Preset {
            name: "arr2-short",
            description: "red-black schedule, five equal strips, error mode, \
                          T=0.1, tau=0.03, dx=0.1, dt=0.001, theta=0.5, h0=t^2",
            configs: single(short_window(ArrangementKind::RedBlack)),
        },
        Preset {
            name: "arr2-long",
            description: "red-black schedule, five equal strips, error mode, \
                          T=10, tau=3, dx=0.1, dt=0.2, theta=0.5, h0=t^2",
            configs: single(long_window(ArrangementKind::RedBlack)),
        },
        Preset {
            name: "arr3-short",
            description: "central-outward schedule, five equal strips, error mode, \
                          T=0.1, tau=0.03, dx=0.1, dt=0.001, theta=0.5, h0=t^2",
            configs: single(short_window(ArrangementKind::CentralOutward)),
        },
        Preset {
            name: "arr3-long",
            description: "central-outward schedule, five equal strips, error mode, \
                          T=10, tau=3, dx=0.1, dt=0.2, theta=0.5, h0=t^2",
            configs: single(long_window(ArrangementKind::CentralOutward)),
        },
        Preset {
            name: "subdomain-sweep",
            description: "central-outward for S in {3,5,7} equal strips and a1 in {0,1}, \
                          T=0.1, tau=0.03, dt=0.001, dx adjusted per S so breakpoints \
                          land on nodes; one CSV per (S, a1)",
            configs: [3usize, 5, 7]
                .into_iter()
                .flat_map(|s| {
                    [0.0, 1.0].into_iter().map(move |a1| {
                        (
                            format!("s{}-a1-{}", s, a1 as i64),
                            subdomain_sweep_config(s, a1),
                        )
                    })
                })
                .collect(),
        },
        Preset {
            name: "unequal-sizes",
            description: "central-outward with strip widths 1.5, 0.5, 1, 0.5, 1.5 on (0,5), \
                          T=1, tau=0.3, dt=0.01 (reconstructed so tau/dt=30), \
                          theta in {0.3,0.5,0.7}; one CSV per a1 in {0,1}",
            configs: two_panel(|a1| ExperimentConfig {
                strips: Strips::Sizes(UNEQUAL_SIZES.to_vec()),
                a1,
                ..unit_window(ArrangementKind::CentralOutward)
            }),
        },
        Preset {
            name: "distinct-inits",
            description: "central-outward, five equal strips, per-interface initializers \
                          h1=t^2, h2=t, h3=sin(t), h4=piecewise, T=1, tau=0.3, dt=0.01 \
                          (reconstructed), theta in {0.3,0.5,0.7}; one CSV per a1 in {0,1}",
            configs: two_panel(|a1| ExperimentConfig {
                initializers: vec![
                    Initializer::T2,
                    Initializer::T,
                    Initializer::Sin,
                    Initializer::Piecewise,
                ],
                a1,
                ..unit_window(ArrangementKind::CentralOutward)
            }),
        },
        Preset {
            name: "unequal-plus-distinct",
            description: "central-outward with unequal strip widths and distinct per-interface \
                          initializers, T=1, tau=0.3, dt=0.01 (reconstructed), \
                          theta in {0.3,0.5,0.7}; one CSV per a1 in {0,1}",
            configs: two_panel(|a1| ExperimentConfig {
                strips: Strips::Sizes(UNEQUAL_SIZES.to_vec()),
                initializers: vec![
                    Initializer::T2,
                    Initializer::T,
                    Initializer::Sin,
                    Initializer::Piecewise,
                ],
                a1,
                ..unit_window(ArrangementKind::CentralOutward)
            }),
        },
        Preset {
            name: "theta-sweep",
            description: "central-outward, five equal strips, long window, \
                          theta = 0.1 .. 1.0 in steps of 0.1",
            configs: single(ExperimentConfig {
                thetas: (1..=10).map(|i| i as f64 / 10.0).collect(),
                ..long_window(ArrangementKind::CentralOutward)
            }),
        },
        Preset {
            name: "two-subdomain-twostep",
            description: "two equal strips, sequential sweep, long window, theta=0.5, \
                          h0=t^2; runs to a tiny tolerance to exhibit the two-step drop",
            configs: single(ExperimentConfig {
                strips: Strips::EqualCount(2),
                arrangement: ArrangementKind::Sweep,
                tolerance: 1e-16,
                max_iterations: 10,
                ..long_window(ArrangementKind::Sweep)
            }),
        },
    ]
}

pub fn find(name: &str) -> Option<Preset> {
    all().into_iter().find(|p| p.name == name)
}
