//! Graph and signal sources shared by every subcommand.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::PathBuf;

use clap::{Args, ValueEnum};

use sgft::datasets::{self, GridSpec, WeightMode};
use sgft::{Graph, SignalVector};

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SourceKind {
    /// Periodic linear graph (`--n`, `--weak i:j:w`).
    Ring,
    /// Periodic 4-neighbour grid (`--rows`, `--cols`, `--boundary-weight`).
    Grid,
    /// Edge-list file (`--edges`).
    Edges,
    /// k-NN graph over a station CSV (`--stations`, `--knn`).
    Stations,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightArg {
    Distance,
    Inverse,
    Gaussian,
}

fn parse_weak(s: &str) -> Result<(usize, usize, f64), String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected i:j:w, got {s:?}"));
    }
    let i = parts[0]
        .parse()
        .map_err(|_| format!("bad vertex {:?}", parts[0]))?;
    let j = parts[1]
        .parse()
        .map_err(|_| format!("bad vertex {:?}", parts[1]))?;
    let w = parts[2]
        .parse()
        .map_err(|_| format!("bad weight {:?}", parts[2]))?;
    Ok((i, j, w))
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[arg(value_enum)]
    pub source: SourceKind,
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    /// Override a ring edge weight, as `i:j:w` (repeatable).
    #[arg(long = "weak", value_parser = parse_weak)]
    pub weak: Vec<(usize, usize, f64)>,
    #[arg(long, default_value_t = 50)]
    pub rows: usize,
    #[arg(long, default_value_t = 50)]
    pub cols: usize,
    /// Weight of the grid edges joining the two signal halves.
    #[arg(long, default_value_t = 1.0)]
    pub boundary_weight: f64,
    /// First column of the right half (default: cols / 2).
    #[arg(long)]
    pub boundary_col: Option<usize>,
    /// Drop the wrap-around grid edges.
    #[arg(long)]
    pub open: bool,
    #[arg(long)]
    pub edges: Option<PathBuf>,
    #[arg(long)]
    pub stations: Option<PathBuf>,
    #[arg(long, default_value_t = 6)]
    pub knn: usize,
    #[arg(long, value_enum, default_value_t = WeightArg::Distance)]
    pub weight_mode: WeightArg,
    /// Bandwidth for `--weight-mode gaussian`.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
}

pub struct Loaded {
    pub graph: Graph,
    pub description: String,
    pub grid: Option<GridSpec>,
    pub coordinates: Option<Vec<[f64; 2]>>,
    pub station_signal: Option<SignalVector>,
}

impl GraphArgs {
    pub fn load(&self) -> CliResult<Loaded> {
        match self.source {
            SourceKind::Ring => {
                let graph = datasets::linear_graph(self.n, &self.weak)?;
                let weak: Vec<String> = self
                    .weak
                    .iter()
                    .map(|(i, j, w)| format!("{i}:{j}:{w}"))
                    .collect();
                Ok(Loaded {
                    graph,
                    description: format!("ring n={} weak=[{}]", self.n, weak.join(",")),
                    grid: None,
                    coordinates: None,
                    station_signal: None,
                })
            }
            SourceKind::Grid => {
                let spec = GridSpec {
                    rows: self.rows,
                    cols: self.cols,
                    periodic: !self.open,
                    boundary_weight: self.boundary_weight,
                    boundary: self.boundary_col.unwrap_or(self.cols / 2),
                };
                let graph = datasets::grid_graph(spec)?;
                Ok(Loaded {
                    graph,
                    description: format!(
                        "grid rows={} cols={} periodic={} boundary_weight={} boundary_col={}",
                        spec.rows, spec.cols, spec.periodic, spec.boundary_weight, spec.boundary
                    ),
                    grid: Some(spec),
                    coordinates: None,
                    station_signal: None,
                })
            }
            SourceKind::Edges => {
                let path = self
                    .edges
                    .as_ref()
                    .ok_or_else(|| CliError::Usage("`edges` source needs --edges FILE".into()))?;
                let graph = sgft::graph::read_edge_list(BufReader::new(File::open(path)?))?;
                Ok(Loaded {
                    graph,
                    description: format!("edges file={}", path.display()),
                    grid: None,
                    coordinates: None,
                    station_signal: None,
                })
            }
            SourceKind::Stations => {
                let path = self.stations.as_ref().ok_or_else(|| {
                    CliError::Usage("`stations` source needs --stations FILE".into())
                })?;
                let data = datasets::load_station_csv(path)?;
                let mode = match self.weight_mode {
                    WeightArg::Distance => WeightMode::Distance,
                    WeightArg::Inverse => WeightMode::InverseDistance,
                    WeightArg::Gaussian => WeightMode::Gaussian { sigma: self.sigma },
                };
                let graph = datasets::knn_graph(&data.points, self.knn, mode)?;
                Ok(Loaded {
                    graph,
                    description: format!(
                        "stations file={} knn={} weight_mode={:?} dropped_rows={}",
                        path.display(),
                        self.knn,
                        mode,
                        data.dropped
                    ),
                    grid: None,
                    coordinates: Some(data.points),
                    station_signal: Some(data.signal),
                })
            }
        }
    }
}

#[derive(Debug, Args)]
pub struct SignalArgs {
    /// Signal file: one value per line, in vertex order (`#` comments allowed).
    /// Defaults to the two-waveform signal for grids and the station values
    /// for station graphs.
    #[arg(long)]
    pub signal: Option<PathBuf>,
    #[arg(long, default_value_t = 2.0)]
    pub freq_left: f64,
    #[arg(long, default_value_t = 10.0)]
    pub freq_right: f64,
}

impl SignalArgs {
    pub fn load(&self, loaded: &Loaded) -> CliResult<SignalVector> {
        let signal = if let Some(path) = &self.signal {
            read_signal(path)?
        } else if let Some(spec) = loaded.grid {
            datasets::two_waveform_signal(spec.rows, spec.cols, self.freq_left, self.freq_right)
        } else if let Some(s) = &loaded.station_signal {
            s.clone()
        } else {
            return Err(CliError::Usage(
                "this graph source needs --signal FILE".into(),
            ));
        };
        if signal.len() != loaded.graph.n() {
            return Err(sgft::Error::DimensionMismatch {
                expected: loaded.graph.n(),
                found: signal.len(),
            }
            .into());
        }
        Ok(signal)
    }

    pub fn describe(&self, loaded: &Loaded) -> String {
        if let Some(path) = &self.signal {
            format!("file={}", path.display())
        } else if loaded.grid.is_some() {
            format!(
                "two-waveform freq_left={} freq_right={}",
                self.freq_left, self.freq_right
            )
        } else {
            "station-values".to_string()
        }
    }
}

fn read_signal(path: &PathBuf) -> CliResult<SignalVector> {
    let mut values = Vec::new();
    for (lineno, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let v: f64 = body.parse().map_err(|_| sgft::Error::MalformedRow {
            line: lineno + 1,
            reason: format!("bad signal value {body:?}"),
        })?;
        values.push(v);
    }
    Ok(SignalVector::new(values))
}
