//! Observables at a point, parameter sweeps, figure presets and CSV output.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplitudes::{compute_with_emission, emission_probabilities, EmissionProbabilities};
use crate::error::{Error, Result};
use crate::measures::{
    concurrence_xstate, mutual_information, rho_from_amplitudes, single_photon_measures,
};
use crate::quadrature::QuadratureSpec;
use crate::units::{from_dimensionless, DimensionlessPoint, InitialState, PhysicalConfig};

/// Which observables a sweep computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObservableSet {
    /// C⁽¹⁾, η₁, S⁽¹⁾, u2, v2, |l|.
    OnePhoton,
    /// Also MI and C(ρ_AB); needs the exchange amplitude for EG.
    Full,
}

impl FromStr for ObservableSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "one-photon" | "onephoton" | "basic" => Ok(ObservableSet::OnePhoton),
            "full" | "all" => Ok(ObservableSet::Full),
            other => Err(Error::Parse(format!(
                "unknown observable set `{other}` (expected one-photon or full)"
            ))),
        }
    }
}

/// One row of a sweep table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointObservables {
    pub x: f64,
    pub z: f64,
    pub omega_t: f64,
    pub channel: InitialState,
    pub c1: f64,
    pub eta1: f64,
    pub s1: f64,
    pub u2: f64,
    pub v2: f64,
    pub abs_l: f64,
    pub mutual_information: Option<f64>,
    pub c_rho: Option<f64>,
    pub quadrature_error_max: f64,
}

/// Observables at `config`, reusing emission probabilities for its ΩT.
pub fn evaluate_with_emission(
    config: &PhysicalConfig,
    emission: &EmissionProbabilities,
    observables: ObservableSet,
    spec: &QuadratureSpec,
) -> Result<PointObservables> {
    let with_b = observables == ObservableSet::Full && config.channel() == InitialState::Eg;
    let report = compute_with_emission(config, emission, spec, with_b)?;
    let set = report.set;
    let one = single_photon_measures(&set)?;
    let (mi, c_rho) = match observables {
        ObservableSet::OnePhoton => (None, None),
        ObservableSet::Full => {
            let rho = rho_from_amplitudes(&set)?;
            (
                Some(mutual_information(&rho)?),
                Some(concurrence_xstate(&rho)?),
            )
        }
    };
    Ok(PointObservables {
        x: config.separation() / config.t_window(),
        z: config.omega_l(),
        omega_t: config.omega_t(),
        channel: config.channel(),
        c1: one.concurrence,
        eta1: one.eta,
        s1: one.entropy,
        u2: set.u2,
        v2: set.v2,
        abs_l: set.l.norm(),
        mutual_information: mi,
        c_rho,
        quadrature_error_max: report.max_relative_error,
    })
}

/// All observables of one configuration.
pub fn evaluate_point(
    config: &PhysicalConfig,
    observables: ObservableSet,
    spec: &QuadratureSpec,
) -> Result<PointObservables> {
    let emission = emission_probabilities(config, spec)?;
    evaluate_with_emission(config, &emission, observables, spec)
}

/// Cutoffs of the form-factor sensitivity report, in units of Ω.
pub const SENSITIVITY_CUTOFFS: [f64; 3] = [25.0, 50.0, 100.0];

/// Observables of one configuration at one cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffRow {
    pub cutoff: f64,
    pub observables: PointObservables,
}

/// `config` re-evaluated at each of [`SENSITIVITY_CUTOFFS`].
pub fn cutoff_sensitivity(
    config: &PhysicalConfig,
    observables: ObservableSet,
    spec: &QuadratureSpec,
) -> Result<Vec<CutoffRow>> {
    SENSITIVITY_CUTOFFS
        .iter()
        .map(|&cutoff| {
            let c = config.with_cutoff(cutoff)?;
            Ok(CutoffRow {
                cutoff,
                observables: evaluate_point(&c, observables, spec)?,
            })
        })
        .collect()
}

/// Coordinate a sweep runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    X,
    Z,
    OmegaT,
    /// Physical separation L, at fixed T.
    L,
}

impl SweepParam {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParam::X => "x",
            SweepParam::Z => "z",
            SweepParam::OmegaT => "omega_t",
            SweepParam::L => "L",
        }
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" => Ok(SweepParam::X),
            "z" => Ok(SweepParam::Z),
            "omega_t" | "omegat" | "wt" => Ok(SweepParam::OmegaT),
            "L" | "l" | "separation" => Ok(SweepParam::L),
            other => Err(Error::Parse(format!(
                "unknown sweep parameter `{other}` (expected x, z, omega_t or L)"
            ))),
        }
    }
}

/// Coordinate held fixed during a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fixed {
    X(f64),
    Z(f64),
    OmegaT(f64),
    /// Physical interaction time T.
    T(f64),
    /// Physical separation L.
    L(f64),
}

impl Fixed {
    pub fn parse(key: &str, value: f64) -> Result<Self> {
        match key {
            "x" => Ok(Fixed::X(value)),
            "z" => Ok(Fixed::Z(value)),
            "omega_t" | "omegat" | "wt" => Ok(Fixed::OmegaT(value)),
            "T" | "t" | "t_window" => Ok(Fixed::T(value)),
            "L" | "l" | "separation" => Ok(Fixed::L(value)),
            other => Err(Error::Parse(format!("unknown fixed coordinate `{other}`"))),
        }
    }

    fn label(&self) -> String {
        match *self {
            Fixed::X(v) => format!("x:{v}"),
            Fixed::Z(v) => format!("z:{v}"),
            Fixed::OmegaT(v) => format!("omega_t:{v}"),
            Fixed::T(v) => format!("T:{v}"),
            Fixed::L(v) => format!("L:{v}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Coord {
    X,
    Z,
    OmegaT,
}

/// Execution mode of a sweep; both give identical rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRequest {
    pub param: SweepParam,
    /// Strictly increasing grid of the swept coordinate.
    pub grid: Vec<f64>,
    pub fixed: Fixed,
    pub omega: f64,
    pub dipole_ratio: f64,
    pub channel: InitialState,
    pub cutoff: f64,
    pub observables: ObservableSet,
    pub spec: QuadratureSpec,
}

impl SweepRequest {
    /// Sweep with Ω = 1, the reference coupling and Λ = 50.
    pub fn new(param: SweepParam, grid: Vec<f64>, fixed: Fixed, channel: InitialState) -> Self {
        SweepRequest {
            param,
            grid,
            fixed,
            omega: 1.0,
            dipole_ratio: crate::units::REFERENCE_DIPOLE_RATIO,
            channel,
            cutoff: crate::units::DEFAULT_CUTOFF,
            observables: ObservableSet::OnePhoton,
            spec: QuadratureSpec::default(),
        }
    }

    /// Dimensionless point for grid value `v`.
    pub fn point(&self, v: f64) -> Result<DimensionlessPoint> {
        let (param, pv) = match self.param {
            SweepParam::X => (Coord::X, v),
            SweepParam::Z => (Coord::Z, v),
            SweepParam::OmegaT => (Coord::OmegaT, v),
            SweepParam::L => (Coord::Z, self.omega * v),
        };
        let (fixed, fv) = match self.fixed {
            Fixed::X(f) => (Coord::X, f),
            Fixed::Z(f) => (Coord::Z, f),
            Fixed::OmegaT(f) => (Coord::OmegaT, f),
            Fixed::T(f) => (Coord::OmegaT, self.omega * f),
            Fixed::L(f) => (Coord::Z, self.omega * f),
        };
        if param == fixed {
            return Err(Error::Parse(format!(
                "cannot sweep {} while holding {} fixed",
                self.param.as_str(),
                self.fixed.label()
            )));
        }
        for (name, value) in [("sweep value", pv), ("fixed value", fv)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::domain(name, value, "must be positive and finite"));
            }
        }
        let get = |c: Coord| {
            if c == param {
                Some(pv)
            } else if c == fixed {
                Some(fv)
            } else {
                None
            }
        };
        let point = match (get(Coord::X), get(Coord::Z), get(Coord::OmegaT)) {
            (Some(x), Some(z), None) => DimensionlessPoint {
                x,
                z,
                omega_t: z / x,
            },
            (Some(x), None, Some(wt)) => DimensionlessPoint {
                x,
                z: x * wt,
                omega_t: wt,
            },
            (None, Some(z), Some(wt)) => DimensionlessPoint {
                x: z / wt,
                z,
                omega_t: wt,
            },
            _ => unreachable!("two distinct coordinates are always given"),
        };
        Ok(point)
    }

    pub fn config(&self, v: f64) -> Result<PhysicalConfig> {
        let point = self.point(v)?;
        from_dimensionless(
            &point,
            self.omega,
            self.dipole_ratio,
            self.channel,
            self.cutoff,
        )
    }

    fn metadata(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("param".into(), self.param.as_str().into());
        m.insert("fixed".into(), self.fixed.label());
        m.insert("omega".into(), format!("{}", self.omega));
        m.insert("dipole_ratio".into(), format!("{}", self.dipole_ratio));
        m.insert("channel".into(), self.channel.as_str().into());
        m.insert("cutoff".into(), format!("{}", self.cutoff));
        m.insert(
            "relative_tolerance".into(),
            format!("{:e}", self.spec.relative_tolerance),
        );
        m.insert(
            "absolute_tolerance".into(),
            format!("{:e}", self.spec.absolute_tolerance),
        );
        m.insert(
            "observables".into(),
            match self.observables {
                ObservableSet::OnePhoton => "one-photon",
                ObservableSet::Full => "full",
            }
            .into(),
        );
        m
    }
}

/// Tabulated observables; the unit of CLI output.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    /// `# key=value` header entries.
    pub metadata: BTreeMap<String, String>,
    pub rows: Vec<PointObservables>,
}

pub const COLUMNS: [&str; 13] = [
    "x",
    "z",
    "omega_t",
    "channel",
    "C1",
    "eta1",
    "S1",
    "u2",
    "v2",
    "abs_l",
    "MI",
    "C_rho",
    "quadrature_error_max",
];

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Parse("empty sweep grid".into()));
    }
    if let Some(w) = grid.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(Error::domain("grid", w[1], "must be strictly increasing"));
    }
    Ok(())
}

fn map_ordered<T, U, F>(items: &[T], execution: Execution, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    match execution {
        Execution::Serial => items.iter().map(f).collect(),
        Execution::Parallel => items.par_iter().map(f).collect(),
    }
}

/// Runs a sweep; rows come back in grid order.
pub fn sweep(request: &SweepRequest, execution: Execution) -> Result<SweepTable> {
    check_grid(&request.grid)?;
    request.spec.validate()?;
    let wrap = |v: f64| {
        let param = request.param.as_str().to_string();
        move |e: Error| Error::SweepPoint {
            param,
            value: v,
            source: Box::new(e),
        }
    };
    let configs = request
        .grid
        .iter()
        .map(|&v| request.config(v).map_err(wrap(v)))
        .collect::<Result<Vec<_>>>()?;

    // emission probabilities depend on ΩT only
    let mut unique: Vec<(u64, usize)> = Vec::new();
    let mut seen = HashMap::new();
    for (i, c) in configs.iter().enumerate() {
        let key = c.omega_t().to_bits();
        if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(key) {
            e.insert(unique.len());
            unique.push((key, i));
        }
    }
    let emissions = map_ordered(&unique, execution, |&(_, i)| {
        emission_probabilities(&configs[i], &request.spec).map_err(wrap(request.grid[i]))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let indices: Vec<usize> = (0..configs.len()).collect();
    let rows = map_ordered(&indices, execution, |&i| {
        let emission = &emissions[seen[&configs[i].omega_t().to_bits()]];
        evaluate_with_emission(&configs[i], emission, request.observables, &request.spec)
            .map_err(wrap(request.grid[i]))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    Ok(SweepTable {
        metadata: request.metadata(),
        rows,
    })
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let step = (b - a) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { b } else { a + step * i as f64 })
                .collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
}

impl Figure {
    pub const ALL: [Figure; 4] = [Figure::Fig1, Figure::Fig2, Figure::Fig3, Figure::Fig4];

    pub fn as_str(self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
        }
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fig1" => Ok(Figure::Fig1),
            "fig2" => Ok(Figure::Fig2),
            "fig3" => Ok(Figure::Fig3),
            "fig4" => Ok(Figure::Fig4),
            other => Err(Error::Parse(format!("unknown figure `{other}`"))),
        }
    }
}

/// Values of z used by the x-sweep presets.
pub const PRESET_Z: [f64; 3] = [5.0, 10.0, 20.0];
/// Values of ΩT used by the z-sweep preset.
pub const PRESET_OMEGA_T: [f64; 3] = [8.0, 10.0, 12.0];

/// The sweeps making up a figure, one per curve.
pub fn figure_requests(which: Figure) -> Vec<SweepRequest> {
    match which {
        Figure::Fig1 => PRESET_Z
            .iter()
            .map(|&z| {
                let mut r = SweepRequest::new(
                    SweepParam::X,
                    linspace(0.05, 3.0, 60),
                    Fixed::Z(z),
                    InitialState::Eg,
                );
                r.observables = ObservableSet::Full;
                r
            })
            .collect(),
        Figure::Fig2 | Figure::Fig3 => {
            let channel = if which == Figure::Fig2 {
                InitialState::Eg
            } else {
                InitialState::Ee
            };
            PRESET_Z
                .iter()
                .map(|&z| {
                    SweepRequest::new(SweepParam::X, linspace(0.2, 3.0, 200), Fixed::Z(z), channel)
                })
                .collect()
        }
        Figure::Fig4 => PRESET_OMEGA_T
            .iter()
            .map(|&wt| {
                SweepRequest::new(
                    SweepParam::Z,
                    linspace(2.0, 16.0, 281),
                    Fixed::OmegaT(wt),
                    InitialState::Ee,
                )
            })
            .collect(),
    }
}

/// Runs every sweep of a figure and concatenates the curves.
pub fn run_figure(
    requests: &[SweepRequest],
    name: &str,
    execution: Execution,
) -> Result<SweepTable> {
    let mut rows = Vec::new();
    let mut metadata = BTreeMap::new();
    let mut curves = Vec::new();
    for r in requests {
        let t = sweep(r, execution)?;
        curves.push(r.fixed.label());
        if metadata.is_empty() {
            metadata = t.metadata;
        }
        rows.extend(t.rows);
    }
    metadata.insert("preset".into(), name.into());
    metadata.insert("fixed".into(), curves.join(";"));
    Ok(SweepTable { metadata, rows })
}

/// Table for one of the figure presets.
pub fn figure_preset(which: Figure) -> Result<SweepTable> {
    run_figure(&figure_requests(which), which.as_str(), Execution::Parallel)
}

fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

impl SweepTable {
    /// Rows whose `fixed` coordinate equals `value` (one curve of a preset).
    pub fn curve(&self, select: impl Fn(&PointObservables) -> bool) -> Vec<PointObservables> {
        self.rows.iter().copied().filter(|r| select(r)).collect()
    }

    /// Largest `quadrature_error_max` over all rows.
    pub fn max_quadrature_error(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.quadrature_error_max)
            .fold(0.0, f64::max)
    }

    /// No NaN in observable columns and every row within `tolerance`.
    pub fn check_invariants(&self, tolerance: f64) -> Result<()> {
        for r in &self.rows {
            let values = [r.x, r.z, r.omega_t, r.c1, r.eta1, r.s1, r.u2, r.v2, r.abs_l];
            let optional = [r.mutual_information, r.c_rho];
            if values.iter().any(|v| !v.is_finite())
                || optional.iter().flatten().any(|v| !v.is_finite())
            {
                return Err(Error::InvalidDensity(format!(
                    "non-finite observable at x = {}, z = {}",
                    r.x, r.z
                )));
            }
            if r.quadrature_error_max > tolerance {
                return Err(Error::NonConvergence {
                    panels: 0,
                    error_estimate: r.quadrature_error_max,
                    tolerance,
                });
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# tangle sweep table\n");
        out.push_str("# units=dimensionless\n");
        out.push_str("# entropy_unit=bits\n");
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}={v}");
        }
        out.push_str(&COLUMNS.join(","));
        out.push('\n');
        for r in &self.rows {
            let opt = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
            let fields = [
                fmt_float(r.x),
                fmt_float(r.z),
                fmt_float(r.omega_t),
                r.channel.as_str().to_string(),
                fmt_float(r.c1),
                fmt_float(r.eta1),
                fmt_float(r.s1),
                fmt_float(r.u2),
                fmt_float(r.v2),
                fmt_float(r.abs_l),
                opt(r.mutual_information),
                opt(r.c_rho),
                fmt_float(r.quadrature_error_max),
            ];
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut metadata = BTreeMap::new();
        let mut rows = Vec::new();
        let mut header_seen = false;
        for (lineno, line) in text.lines().enumerate() {
            let bad = |what: &str| Error::Parse(format!("line {}: {what}", lineno + 1));
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.trim().split_once('=') {
                    if !matches!(k, "units" | "entropy_unit") {
                        metadata.insert(k.to_string(), v.to_string());
                    }
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if !header_seen {
                if fields != COLUMNS {
                    return Err(bad("unexpected column header"));
                }
                header_seen = true;
                continue;
            }
            if fields.len() != COLUMNS.len() {
                return Err(bad("wrong number of fields"));
            }
            let num = |i: usize| -> Result<f64> {
                fields[i]
                    .parse::<f64>()
                    .map_err(|_| bad(&format!("bad number `{}`", fields[i])))
            };
            let opt = |i: usize| -> Result<Option<f64>> {
                if fields[i].is_empty() {
                    Ok(None)
                } else {
                    num(i).map(Some)
                }
            };
            rows.push(PointObservables {
                x: num(0)?,
                z: num(1)?,
                omega_t: num(2)?,
                channel: fields[3].parse()?,
                c1: num(4)?,
                eta1: num(5)?,
                s1: num(6)?,
                u2: num(7)?,
                v2: num(8)?,
                abs_l: num(9)?,
                mutual_information: opt(10)?,
                c_rho: opt(11)?,
                quadrature_error_max: num(12)?,
            });
        }
        if !header_seen {
            return Err(Error::Parse("missing column header".into()));
        }
        Ok(SweepTable { metadata, rows })
    }

    /// gnuplot script plotting the table stored at `csv_path`.
    pub fn gnuplot_script(&self, csv_path: &str) -> String {
        let param = self
            .metadata
            .get("param")
            .map(String::as_str)
            .unwrap_or("x");
        let (xcol, xlabel) = match param {
            "z" | "L" => (2, "z = {/Symbol W}L/c"),
            "omega_t" => (3, "{/Symbol W}T"),
            _ => (1, "x = L/cT"),
        };
        let two_qubit = self.rows.iter().any(|r| r.c_rho.is_some());
        let mut s = String::new();
        let _ = writeln!(s, "set datafile separator ','");
        let _ = writeln!(s, "set datafile commentschars '#'");
        let _ = writeln!(s, "set key autotitle columnhead");
        let _ = writeln!(s, "set xlabel '{xlabel}'");
        let curves: Vec<String> = self
            .metadata
            .get("fixed")
            .map(|f| f.split(';').map(str::to_string).collect())
            .unwrap_or_default();
        let columns: &[(usize, &str)] = if two_qubit {
            &[(11, "MI"), (12, "C(rho_AB)")]
        } else {
            &[(5, "C1")]
        };
        let mut plots = Vec::new();
        for (col, name) in columns {
            if curves.len() <= 1 {
                plots.push(format!(
                    "'{csv_path}' skip 1 using {xcol}:{col} with lines title '{name}'"
                ));
                continue;
            }
            for curve in &curves {
                let Some((key, value)) = curve.split_once(':') else {
                    continue;
                };
                let kcol = match key {
                    "x" => 1,
                    "z" | "L" => 2,
                    _ => 3,
                };
                plots.push(format!(
                    "'{csv_path}' skip 1 using {xcol}:(abs(${kcol}-{value})<1e-9*{value} ? ${col} : 1/0) with lines title '{name} {key}={value}'"
                ));
            }
        }
        let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
        s
    }
}
