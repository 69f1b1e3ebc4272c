//! load -> operators -> build -> initial state -> evolve -> measure -> write.

use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use num_complex::Complex64;
use qsw_core::{
    generator_matrix, local_lindblad, nm_h, nm_h_rot, nm_l, nm_vsets, read_matrix_market_file, select_parameters,
    symmetrize, DensityMatrix, InitialState, QswError, StateVector, TaylorParameters, WalkSystem, WeightedDigraph,
};
use serde_json::json;

use crate::config::{InitialSpec, OperatorStyle, RunConfig, TimeSpec, WalkChoice};
use crate::container::{write_container, ResultContainer};
use crate::CliError;

/// Runs the walk described by `cfg` and writes the container to `out`.
pub fn run(cfg: &RunConfig, out: &Path) -> Result<ResultContainer, CliError> {
    let container = execute(cfg)?;
    write_container(&container, out)?;
    Ok(container)
}

/// Everything in [`run`] except writing.
pub fn execute(cfg: &RunConfig) -> Result<ResultContainer, CliError> {
    cfg.validate()?;
    let graph = read_matrix_market_file(&cfg.graph).map_err(|e| match e {
        QswError::Io(msg) => CliError::Config(format!("cannot read graph {}: {msg}", cfg.graph.display())),
        other => CliError::Config(format!("{}: {other}", cfg.graph.display())),
    })?;
    let mut walk = build_walk(cfg, &graph)?;
    if let Some(tol) = cfg.tolerance {
        walk.set_tolerance(tol)?;
    }
    walk.initial_state(initial_state(cfg, &walk)?)?;

    let (times, states, params) = evolve(cfg, &mut walk)?;
    if let Some(k) = states.iter().position(|s| !s.is_finite()) {
        return Err(CliError::Numerical(format!("state at t = {} is not finite", times[k])));
    }
    measure(cfg, &walk, times, &states, params)
}

fn build_walk(cfg: &RunConfig, g: &WeightedDigraph) -> Result<WalkSystem, CliError> {
    let n = g.n_vertices();
    let gu = symmetrize(g);
    let attach = |list: &[crate::Attachment], what: &str| -> Result<Vec<(usize, f64)>, CliError> {
        list.iter()
            .map(|a| {
                if a.vertex > n {
                    Err(CliError::Config(format!("{what} vertex {} outside 1..={n}", a.vertex)))
                } else {
                    Ok((a.vertex - 1, a.rate))
                }
            })
            .collect()
    };
    let walk = match (cfg.walk, cfg.operators) {
        (WalkChoice::Local, style) => {
            let (h, m_l) = match style {
                OperatorStyle::Generator => (
                    generator_matrix(cfg.gamma, &gu)?,
                    local_lindblad(&generator_matrix(cfg.gamma, g)?),
                ),
                OperatorStyle::Adjacency => (
                    gu.adjacency().scale(Complex64::new(cfg.gamma, 0.0)),
                    g.adjacency().clone(),
                ),
            };
            let sources = attach(&cfg.sources, "source")?;
            let sinks = attach(&cfg.sinks, "sink")?;
            WalkSystem::new_lqsw(cfg.omega, &h, &m_l, &sources, &sinks, cfg.workers)?
        }
        (WalkChoice::Global, style) => {
            let h = match style {
                OperatorStyle::Generator => generator_matrix(cfg.gamma, &gu)?,
                OperatorStyle::Adjacency => gu.adjacency().scale(Complex64::new(cfg.gamma, 0.0)),
            };
            WalkSystem::new_gqsw(cfg.omega, &h, &[g.adjacency().clone()], None, None, cfg.workers)?
        }
        (WalkChoice::NonMoralising, _) => {
            let vsets = nm_vsets(&gu);
            let h = nm_h(cfg.gamma, &gu, &vsets)?;
            let l = nm_l(cfg.gamma, g, &vsets)?;
            let h_rot = nm_h_rot(&vsets);
            WalkSystem::new_gqsw(cfg.omega, &h, &[l], Some(&h_rot), Some(&vsets), cfg.workers)?
        }
    };
    Ok(walk)
}

/// Population vectors cover the graph vertices; for local walks they are
/// padded with zeros on sources and sinks.
fn initial_state(cfg: &RunConfig, walk: &WalkSystem) -> Result<InitialState, CliError> {
    let n = walk.base_vertex_count();
    let padded = |mut p: Vec<f64>| -> Result<InitialState, CliError> {
        let full = if walk.subspaces().is_some() {
            n
        } else {
            walk.augmented_count()
        };
        if p.len() == n {
            p.resize(full, 0.0);
        }
        if p.len() != full {
            return Err(CliError::Config(format!(
                "initial populations need {n} entries, got {}",
                p.len()
            )));
        }
        Ok(InitialState::Populations(p))
    };
    match &cfg.initial {
        InitialSpec::Mixed => padded(vec![1.0 / n as f64; n]),
        InitialSpec::Vertex(k) => {
            if *k > n {
                return Err(CliError::Config(format!("initial vertex {k} outside 1..={n}")));
            }
            let mut p = vec![0.0; n];
            p[k - 1] = 1.0;
            padded(p)
        }
        InitialSpec::Populations(p) => padded(p.clone()),
        InitialSpec::File(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            let values = text
                .split_whitespace()
                .map(str::parse::<f64>)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let d = walk.augmented_count();
            if values.len() == 2 * d * d {
                let entries = values.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
                Ok(InitialState::Density(DensityMatrix::new(d, entries)?))
            } else {
                padded(values)
            }
        }
    }
}

type Evolution = (Vec<f64>, Vec<StateVector>, TaylorParameters);

fn evolve(cfg: &RunConfig, walk: &mut WalkSystem) -> Result<Evolution, CliError> {
    let params =
        |walk: &WalkSystem, t: f64| select_parameters(walk.liouvillian().one_norms(), t, walk.expm_config().theta());
    let single = |walk: &mut WalkSystem, t: f64| -> Result<Evolution, CliError> {
        let p = params(walk, t);
        walk.step(t)?;
        Ok((vec![t], vec![walk.state().expect("state set").clone()], p))
    };
    match cfg.time {
        TimeSpec::Single { t } => single(walk, t),
        TimeSpec::Series { t1, steps: 0, .. } => single(walk, t1),
        TimeSpec::Series { t1, tq, steps } => {
            let out = walk.series(t1, tq, steps)?;
            Ok((out.times, out.states, out.parameters))
        }
    }
}

fn measure(
    cfg: &RunConfig,
    walk: &WalkSystem,
    times: Vec<f64>,
    states: &[StateVector],
    params: TaylorParameters,
) -> Result<ResultContainer, CliError> {
    let q = times.len();
    let n = walk.measured_count();
    let d = walk.augmented_count();
    let l = walk.liouvillian();
    let created = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|t| t.as_secs())
        .unwrap_or(0);
    let metadata = json!({
        "format": "qswc",
        "library_version": env!("CARGO_PKG_VERSION"),
        "created_unix": created,
        "config": cfg,
        "walk_kind": walk.kind().as_str(),
        "workers": walk.n_workers(),
        "n_times": q,
        "n_vertices": n,
        "density_dim": d,
        "liouvillian": { "dim": l.dim(), "nnz": l.nnz(), "sparsity": l.sparsity() },
        "expm": {
            "tolerance": walk.expm_config().tolerance(),
            "one_norm": l.one_norms().first().copied().unwrap_or(0.0),
            "m_star": params.m_star,
            "s": params.s,
        },
    });
    let mut c = ResultContainer::new(metadata);
    c.push_array("times", vec![q], times)?;
    if cfg.outputs.populations {
        let data = states.iter().flat_map(|s| walk.populations_of(s)).collect();
        c.push_array("populations", vec![q, n], data)?;
    }
    if cfg.outputs.full_rho || cfg.outputs.coherence_norm {
        let rhos: Vec<DensityMatrix> = states.iter().map(|s| walk.density_of(s)).collect();
        if cfg.outputs.full_rho {
            let re = rhos.iter().flat_map(|r| r.entries().iter().map(|z| z.re)).collect();
            let im = rhos.iter().flat_map(|r| r.entries().iter().map(|z| z.im)).collect();
            c.push_array("rho_re", vec![q, d, d], re)?;
            c.push_array("rho_im", vec![q, d, d], im)?;
        }
        if cfg.outputs.coherence_norm {
            c.push_array(
                "coherence_norm",
                vec![q],
                rhos.iter().map(DensityMatrix::max_coherence).collect(),
            )?;
        }
    }
    c.validate()?;
    Ok(c)
}
