//! Named figure presets: each one expands into a list of output files
//! (efficiency sweeps, dip-characterization scans, or a phase diagram)
//! reproducing the reference curves at desk scale.

use enaqt::analytic::{dip_depth, dip_location_uniform};
use enaqt::model::ChainSpec;
use enaqt::sweep::{linspace, logspace, Scale, SweepParameter};

use crate::CliError;

/// One output file of a preset.
pub enum PresetJob {
    /// Efficiency sweep written as `param,eta`.
    Sweep {
        stem: String,
        spec: ChainSpec,
        param: SweepParameter,
        grid: Vec<f64>,
        scale: Scale,
    },
    /// Precomputed scan written as `param,value`.
    Curve {
        stem: String,
        value_name: &'static str,
        rows: Vec<(f64, Option<f64>)>,
    },
    /// Phase diagram plus overlay file.
    Phase {
        stem: String,
        c_grid: Vec<f64>,
        delta_grid: Vec<f64>,
    },
}

pub const PRESET_NAMES: &[&str] = &[
    "fig1a", "fig1b", "fig1c", "fig1d", "fig2", "fig3ab", "fig3c", "fig3d", "fig4", "fig5a",
    "fig5b", "fig5c", "fig5d",
];

/// The two dephasing variants shown in the two-site figures.
const DEPH_CURVES: [(&str, f64); 2] = [("gamma0", 0.0), ("gamma0.2", 0.2)];

fn hop_sweep(stem: String, spec: ChainSpec) -> PresetJob {
    PresetJob::Sweep {
        stem,
        spec,
        param: SweepParameter::GammaHop,
        grid: logspace(1e-2, 1e3, 200),
        scale: Scale::Log,
    }
}

/// Expand a preset into jobs. `n_override` narrows `fig2` to one chain
/// length; `xi_override` narrows `fig4`/`fig5c` to one linked ratio.
pub fn expand(
    name: &str,
    n_override: Option<usize>,
    xi_override: Option<f64>,
) -> Result<Vec<PresetJob>, CliError> {
    let jobs = match name {
        // uniform two-site crossover: η(γ_h) for γ = 0 and γ = 0.2
        "fig1a" => DEPH_CURVES
            .iter()
            .map(|&(label, gamma)| {
                hop_sweep(
                    format!("fig1a_{label}"),
                    ChainSpec::line(2).with_gamma_deph(gamma),
                )
            })
            .collect(),

        // dip position against the total dissipation rate 2Γ+Λ
        "fig1b" => DEPH_CURVES
            .iter()
            .map(|&(label, gamma)| {
                let rows = linspace(0.02, 2.8, 200)
                    .into_iter()
                    .map(|c| {
                        // keep Λ/Γ = 10 inside the total
                        let (g, l) = (c / 12.0, 10.0 * c / 12.0);
                        (c, dip_location_uniform(1.0, g, l, gamma))
                    })
                    .collect();
                PresetJob::Curve {
                    stem: format!("fig1b_{label}"),
                    value_name: "dip position gamma_h* (units of v)",
                    rows,
                }
            })
            .collect(),

        // relative dip depth against Λ/Γ at Γ/v = 0.02
        "fig1c" => DEPH_CURVES
            .iter()
            .map(|&(label, gamma)| {
                let rows = logspace(0.1, 100.0, 200)
                    .into_iter()
                    .map(|ratio| {
                        let (g, l) = (0.02, 0.02 * ratio);
                        (ratio, numeric_depth(g, l, gamma))
                    })
                    .collect();
                PresetJob::Curve {
                    stem: format!("fig1c_{label}"),
                    value_name: "relative dip depth (eta_c - eta_min)/eta_c",
                    rows,
                }
            })
            .collect(),

        // relative dip depth against 2Γ+Λ at Λ/Γ = 10
        "fig1d" => DEPH_CURVES
            .iter()
            .map(|&(label, gamma)| {
                let rows = logspace(1e-2, 2.6, 200)
                    .into_iter()
                    .map(|c| {
                        let (g, l) = (c / 12.0, 10.0 * c / 12.0);
                        (c, numeric_depth(g, l, gamma))
                    })
                    .collect();
                PresetJob::Curve {
                    stem: format!("fig1d_{label}"),
                    value_name: "relative dip depth (eta_c - eta_min)/eta_c",
                    rows,
                }
            })
            .collect(),

        // uniform chains of growing length
        "fig2" => {
            let ns: Vec<usize> = match n_override {
                Some(n) => vec![n],
                None => vec![3, 5, 10, 20],
            };
            ns.into_iter()
                .map(|n| hop_sweep(format!("fig2_n{n}"), ChainSpec::line(n)))
                .collect()
        }

        // extrema-count partition of the (2Γ+Λ, δ) plane
        "fig3ab" => vec![PresetJob::Phase {
            stem: "fig3ab".into(),
            c_grid: linspace(0.04, 4.0, 100),
            delta_grid: linspace(0.0, 0.99, 100),
        }],

        // region-I example (δ = 0.4): maximum then minimum
        "fig3c" => DEPH_CURVES
            .iter()
            .map(|&(label, gamma)| {
                hop_sweep(
                    format!("fig3c_{label}"),
                    ChainSpec::line(2).with_detuning(0.4).with_gamma_deph(gamma),
                )
            })
            .collect(),

        // region-B example (δ = 0.6): monotone growth
        "fig3d" => DEPH_CURVES
            .iter()
            .map(|&(label, gamma)| {
                hop_sweep(
                    format!("fig3d_{label}"),
                    ChainSpec::line(2).with_detuning(0.6).with_gamma_deph(gamma),
                )
            })
            .collect(),

        // dephasing sweeps with linked hopping, two-site δ = 5
        "fig4" => {
            let xis: Vec<f64> = match xi_override {
                Some(xi) => vec![xi],
                None => vec![0.0, 1e-3, 1e-2, 1e-1],
            };
            xis.into_iter()
                .map(|xi| {
                    let param = if xi == 0.0 {
                        SweepParameter::GammaDeph
                    } else {
                        SweepParameter::GammaDephLinked { xi }
                    };
                    PresetJob::Sweep {
                        stem: format!("fig4_xi{xi}"),
                        spec: ChainSpec::line(2).with_detuning(5.0),
                        param,
                        grid: logspace(1e-2, 1e4, 200),
                        scale: Scale::Log,
                    }
                })
                .collect()
        }

        // branched three-site chain, sink on the hub
        "fig5a" => vec![PresetJob::Sweep {
            stem: "fig5a".into(),
            spec: ChainSpec::lambda_three_site(),
            param: SweepParameter::Delta,
            grid: linspace(0.0, 20.0, 201),
            scale: Scale::Linear,
        }],
        "fig5b" => vec![hop_sweep(
            "fig5b".into(),
            ChainSpec::lambda_three_site().with_detuning(10.0),
        )],
        "fig5c" => {
            let xi = xi_override.unwrap_or(1e-3);
            vec![PresetJob::Sweep {
                stem: format!("fig5c_xi{xi}"),
                spec: ChainSpec::lambda_three_site().with_detuning(10.0),
                param: SweepParameter::GammaDephLinked { xi },
                grid: logspace(1e-2, 1e4, 200),
                scale: Scale::Log,
            }]
        }
        "fig5d" => vec![PresetJob::Sweep {
            stem: "fig5d".into(),
            spec: ChainSpec::lambda_three_site().with_detuning(10.0),
            param: SweepParameter::GammaDeph,
            grid: logspace(1e-2, 1e4, 200),
            scale: Scale::Log,
        }],

        other => {
            return Err(CliError::Config(format!(
                "unknown preset `{other}`; available: {}",
                PRESET_NAMES.join(", ")
            )));
        }
    };
    Ok(jobs)
}

fn numeric_depth(gamma_diss: f64, lambda_sink: f64, gamma_deph: f64) -> Option<f64> {
    if gamma_deph == 0.0 {
        return dip_depth(1.0, gamma_diss, lambda_sink).ok().map(|d| d.numeric);
    }
    // with dephasing the closed-form bracket does not apply; minimize the
    // full expression directly
    let p = enaqt::analytic::TwoSiteParams {
        v: 1.0,
        delta: 0.0,
        gamma_diss,
        gamma_deph,
        gamma_hop: 0.0,
        lambda_sink,
    };
    dip_location_uniform(1.0, gamma_diss, lambda_sink, gamma_deph)?;
    let eta_c = enaqt::analytic::eta_saturated(gamma_diss, lambda_sink).ok()?;
    if eta_c <= 0.0 {
        return None;
    }
    let objective =
        |gh: f64| enaqt::analytic::eta_two_site(&p.with_gamma_hop(gh)).unwrap_or(f64::INFINITY);
    let min = enaqt::scalar::minimize(&objective, 0.0, 1e3);
    Some((eta_c - min.value) / eta_c)
}
