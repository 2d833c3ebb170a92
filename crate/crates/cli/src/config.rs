//! Run configuration: a flat TOML file with `[chain]`, `[rates]`, `[sweep]`,
//! `[phase]`, and `[run]` sections. Every field is optional and falls back
//! to documented defaults (two-site line chain, Γ/v = 0.02, Λ/Γ = 10).
//! Unknown keys are rejected, and a resolved configuration serializes to a
//! canonical form that parses back to itself.

use serde::{Deserialize, Serialize};

use enaqt::model::{ChainSpec, DEFAULT_GAMMA_DISS, DEFAULT_LAMBDA_SINK};
use enaqt::sweep::{linspace, logspace, Scale, SweepParameter};

use crate::CliError;

// ---- raw (on-disk) form ----------------------------------------------------

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    chain: Option<RawChain>,
    rates: Option<RawRates>,
    sweep: Option<RawSweep>,
    phase: Option<RawPhase>,
    run: Option<RawRun>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChain {
    n_sites: Option<usize>,
    /// `"line"` (default) or `"lambda"`; mutually exclusive with `edges`.
    topology: Option<String>,
    edges: Option<Vec<[usize; 2]>>,
    /// Full per-site energy list; mutually exclusive with `delta`.
    site_energies: Option<Vec<f64>>,
    /// Shorthand: site 1 at `delta`, all others at zero.
    delta: Option<f64>,
    init_site: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRates {
    v: Option<f64>,
    gamma_diss: Option<f64>,
    gamma_deph: Option<f64>,
    gamma_hop: Option<f64>,
    lambda_sink: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    param: String,
    xi: Option<f64>,
    start: f64,
    stop: f64,
    points: usize,
    scale: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhase {
    c_start: Option<f64>,
    c_stop: Option<f64>,
    c_points: Option<usize>,
    delta_start: Option<f64>,
    delta_stop: Option<f64>,
    delta_points: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    tol: Option<f64>,
    workers: Option<usize>,
    output: Option<String>,
}

// ---- resolved (canonical) form ----------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Resolved {
    pub chain: ChainSection,
    pub rates: RatesSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    pub phase: PhaseSection,
    pub run: RunSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSection {
    pub n_sites: usize,
    pub edges: Vec<[usize; 2]>,
    pub site_energies: Vec<f64>,
    pub init_site: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesSection {
    pub v: f64,
    pub gamma_diss: f64,
    pub gamma_deph: f64,
    pub gamma_hop: f64,
    pub lambda_sink: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub param: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub scale: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseSection {
    pub c_start: f64,
    pub c_stop: f64,
    pub c_points: usize,
    pub delta_start: f64,
    pub delta_stop: f64,
    pub delta_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub tol: f64,
    pub workers: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl Default for PhaseSection {
    fn default() -> Self {
        Self {
            c_start: 0.04,
            c_stop: 4.0,
            c_points: 100,
            delta_start: 0.0,
            delta_stop: 0.99,
            delta_points: 100,
        }
    }
}

impl Resolved {
    /// Parse and resolve a TOML document.
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| CliError::Config(format!("config parse: {e}")))?;
        resolve(raw)
    }

    /// Defaults only (no config file).
    pub fn default_config() -> Self {
        resolve(RawConfig::default()).expect("defaults are valid")
    }

    /// Canonical text form; parses back to an identical configuration.
    pub fn canonical_toml(&self) -> String {
        toml::to_string(self).expect("resolved config serializes")
    }

    /// The chain instance this configuration describes.
    pub fn chain_spec(&self) -> ChainSpec {
        ChainSpec {
            n_sites: self.chain.n_sites,
            edges: self.chain.edges.iter().map(|&[a, b]| (a, b)).collect(),
            site_energies: self.chain.site_energies.clone(),
            v: self.rates.v,
            gamma_diss: self.rates.gamma_diss,
            gamma_deph: self.rates.gamma_deph,
            gamma_hop: self.rates.gamma_hop,
            lambda_sink: self.rates.lambda_sink,
            init_site: self.chain.init_site,
        }
    }

    /// Sweep request as solver types: `(parameter, grid, scale)`.
    pub fn sweep_request(&self) -> Result<(SweepParameter, Vec<f64>, Scale), CliError> {
        let sweep = self
            .sweep
            .as_ref()
            .ok_or_else(|| CliError::Config("a [sweep] section is required".into()))?;
        let param = match sweep.param.as_str() {
            "gamma_hop" => SweepParameter::GammaHop,
            "gamma_deph" => SweepParameter::GammaDeph,
            "gamma_diss" => SweepParameter::GammaDiss,
            "lambda_sink" => SweepParameter::LambdaSink,
            "delta" => SweepParameter::Delta,
            "gamma_deph_linked" => SweepParameter::GammaDephLinked {
                xi: sweep.xi.ok_or_else(|| {
                    CliError::Config("sweep.xi is required for gamma_deph_linked".into())
                })?,
            },
            other => {
                return Err(CliError::Config(format!("unknown sweep.param `{other}`")));
            }
        };
        let scale = match sweep.scale.as_str() {
            "log" => Scale::Log,
            "linear" => Scale::Linear,
            other => return Err(CliError::Config(format!("unknown sweep.scale `{other}`"))),
        };
        let grid = build_grid(sweep.start, sweep.stop, sweep.points, scale, "sweep")?;
        Ok((param, grid, scale))
    }

    /// Phase-diagram grids `(c_grid, delta_grid)`.
    pub fn phase_grids(&self) -> Result<(Vec<f64>, Vec<f64>), CliError> {
        let p = &self.phase;
        let c = build_grid(p.c_start, p.c_stop, p.c_points, Scale::Linear, "phase.c")?;
        let d = build_grid(
            p.delta_start,
            p.delta_stop,
            p.delta_points,
            Scale::Linear,
            "phase.delta",
        )?;
        Ok((c, d))
    }
}

fn build_grid(
    start: f64,
    stop: f64,
    points: usize,
    scale: Scale,
    what: &str,
) -> Result<Vec<f64>, CliError> {
    if points == 0 {
        return Err(CliError::Config(format!("{what}: empty grid (points = 0)")));
    }
    if points > 1 && stop <= start {
        return Err(CliError::Config(format!("{what}: stop must exceed start")));
    }
    Ok(match scale {
        Scale::Linear => linspace(start, stop, points),
        Scale::Log => {
            if start <= 0.0 {
                return Err(CliError::Config(format!("{what}: log grids need start > 0")));
            }
            logspace(start, stop, points)
        }
    })
}

fn resolve(raw: RawConfig) -> Result<Resolved, CliError> {
    let chain = raw.chain.unwrap_or_default();
    let rates = raw.rates.unwrap_or_default();
    let run = raw.run.unwrap_or_default();

    let n_sites = chain.n_sites.unwrap_or(2);

    let edges: Vec<[usize; 2]> = match (&chain.topology, &chain.edges) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "chain.topology and chain.edges are mutually exclusive".into(),
            ));
        }
        (_, Some(e)) => e.clone(),
        (Some(t), None) => match t.as_str() {
            "line" => (1..n_sites).map(|k| [k, k + 1]).collect(),
            "lambda" => {
                if n_sites != 3 {
                    return Err(CliError::Config(
                        "chain.topology = \"lambda\" requires n_sites = 3".into(),
                    ));
                }
                vec![[1, 3], [2, 3]]
            }
            other => {
                return Err(CliError::Config(format!("unknown chain.topology `{other}`")));
            }
        },
        (None, None) => (1..n_sites).map(|k| [k, k + 1]).collect(),
    };

    let site_energies = match (&chain.site_energies, chain.delta) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "chain.site_energies and chain.delta are mutually exclusive".into(),
            ));
        }
        (Some(w), None) => w.clone(),
        (None, Some(delta)) => {
            let mut w = vec![0.0; n_sites];
            if !w.is_empty() {
                w[0] = delta;
            }
            w
        }
        (None, None) => vec![0.0; n_sites],
    };

    let resolved = Resolved {
        chain: ChainSection {
            n_sites,
            edges,
            site_energies,
            init_site: chain.init_site.unwrap_or(1),
        },
        rates: RatesSection {
            v: rates.v.unwrap_or(1.0),
            gamma_diss: rates.gamma_diss.unwrap_or(DEFAULT_GAMMA_DISS),
            gamma_deph: rates.gamma_deph.unwrap_or(0.0),
            gamma_hop: rates.gamma_hop.unwrap_or(0.0),
            lambda_sink: rates.lambda_sink.unwrap_or(DEFAULT_LAMBDA_SINK),
        },
        sweep: raw.sweep.map(|s| SweepSection {
            param: s.param,
            xi: s.xi,
            start: s.start,
            stop: s.stop,
            points: s.points,
            scale: s.scale.unwrap_or_else(|| "log".to_string()),
        }),
        phase: {
            let p = raw.phase.unwrap_or_default();
            let d = PhaseSection::default();
            PhaseSection {
                c_start: p.c_start.unwrap_or(d.c_start),
                c_stop: p.c_stop.unwrap_or(d.c_stop),
                c_points: p.c_points.unwrap_or(d.c_points),
                delta_start: p.delta_start.unwrap_or(d.delta_start),
                delta_stop: p.delta_stop.unwrap_or(d.delta_stop),
                delta_points: p.delta_points.unwrap_or(d.delta_points),
            }
        },
        run: RunSection {
            tol: run.tol.unwrap_or(enaqt::dynamics::DEFAULT_TOL),
            workers: run.workers.unwrap_or(0),
            output: run.output,
        },
    };

    // the chain spec itself must be structurally valid
    resolved.chain_spec().validate().map_err(|e| CliError::Config(e.to_string()))?;
    // sweep section sanity happens lazily in sweep_request(); validate the
    // sweep param name eagerly so bad configs fail on parse
    if resolved.sweep.is_some() {
        resolved.sweep_request()?;
    }
    Ok(resolved)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_describe_the_two_site_preset() {
        let r = Resolved::default_config();
        let spec = r.chain_spec();
        assert_eq!(spec.n_sites, 2);
        assert_eq!(spec.gamma_diss, 0.02);
        assert_eq!(spec.lambda_sink, 0.2);
        assert_eq!(spec.edges, vec![(1, 2)]);
        assert_eq!(r.run.tol, 1e-10);
    }

    #[test]
    fn canonical_form_round_trips() {
        let text = r#"
[chain]
n_sites = 3
topology = "lambda"
delta = 10.0

[rates]
gamma_deph = 0.5

[sweep]
param = "gamma_hop"
start = 0.01
stop = 100.0
points = 50
"#;
        let resolved = Resolved::from_toml(text).unwrap();
        let canonical = resolved.canonical_toml();
        let reparsed = Resolved::from_toml(&canonical).unwrap();
        assert_eq!(resolved, reparsed);
        assert_eq!(reparsed.canonical_toml(), canonical);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = Resolved::from_toml("[rates]\ngamma_dephasing = 0.5\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("gamma_dephasing"), "message was: {msg}");
        assert!(Resolved::from_toml("[sweeps]\n").is_err());
    }

    #[test]
    fn conflicting_shorthands_are_rejected() {
        let bad = "[chain]\ndelta = 1.0\nsite_energies = [1.0, 0.0]\n";
        assert!(Resolved::from_toml(bad).is_err());
        let bad = "[chain]\nn_sites = 3\ntopology = \"lambda\"\nedges = [[1, 2]]\n";
        assert!(Resolved::from_toml(bad).is_err());
    }

    #[test]
    fn empty_and_invalid_grids_are_config_errors() {
        let empty = "[sweep]\nparam = \"gamma_hop\"\nstart = 0.1\nstop = 1.0\npoints = 0\n";
        assert!(Resolved::from_toml(empty).is_err());
        let backwards = "[sweep]\nparam = \"gamma_hop\"\nstart = 1.0\nstop = 0.1\npoints = 5\n";
        assert!(Resolved::from_toml(backwards).is_err());
        let logzero =
            "[sweep]\nparam = \"gamma_hop\"\nstart = 0.0\nstop = 1.0\npoints = 5\nscale = \"log\"\n";
        assert!(Resolved::from_toml(logzero).is_err());
        let badparam = "[sweep]\nparam = \"gamma\"\nstart = 0.1\nstop = 1.0\npoints = 5\n";
        assert!(Resolved::from_toml(badparam).is_err());
    }

    #[test]
    fn linked_sweep_requires_xi() {
        let missing =
            "[sweep]\nparam = \"gamma_deph_linked\"\nstart = 0.1\nstop = 1.0\npoints = 5\n";
        assert!(Resolved::from_toml(missing).is_err());
        let ok = "[sweep]\nparam = \"gamma_deph_linked\"\nxi = 0.001\nstart = 0.1\nstop = 1.0\npoints = 5\n";
        let r = Resolved::from_toml(ok).unwrap();
        let (param, grid, _) = r.sweep_request().unwrap();
        assert!(matches!(param, SweepParameter::GammaDephLinked { xi } if xi == 0.001));
        assert_eq!(grid.len(), 5);
    }

    #[test]
    fn spec_validation_failures_are_config_errors() {
        let bad = "[rates]\ngamma_hop = -1.0\n";
        let err = Resolved::from_toml(bad).unwrap_err();
        assert!(err.to_string().contains("gamma_hop"));
    }
}
