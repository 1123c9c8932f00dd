//! Run configuration: TOML file merged with command-line flags.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use super::CliError;
use crate::builtin::EinsteinBase;
use crate::chart::Point;
use crate::flows::{
    ansatz_ode_family, exact_einstein_family, grid, warped_sphere_family, wrong_sphere_family, ConformalGridFamily,
    FlowMap, MetricFamily, MIN_GRID,
};

/// Built-in families selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilySpec {
    FlatTorus,
    Sphere2,
    Sphere3,
    Hyperbolic2,
    S2xS2,
    WrongSphere2,
    WarpedSphere2,
    ConformalTorus,
}

impl FamilySpec {
    pub const ALL: [FamilySpec; 8] = [
        FamilySpec::FlatTorus,
        FamilySpec::Sphere2,
        FamilySpec::Sphere3,
        FamilySpec::Hyperbolic2,
        FamilySpec::S2xS2,
        FamilySpec::WrongSphere2,
        FamilySpec::WarpedSphere2,
        FamilySpec::ConformalTorus,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::FlatTorus => "flat-torus",
            FamilySpec::Sphere2 => "sphere2",
            FamilySpec::Sphere3 => "sphere3",
            FamilySpec::Hyperbolic2 => "hyperbolic2",
            FamilySpec::S2xS2 => "s2xs2",
            FamilySpec::WrongSphere2 => "wrong-sphere2",
            FamilySpec::WarpedSphere2 => "warped-sphere2",
            FamilySpec::ConformalTorus => "conformal-torus",
        }
    }

    /// Einstein blocks of the families that have them.
    fn blocks(&self) -> Option<Vec<EinsteinBase>> {
        match self {
            FamilySpec::FlatTorus => Some(vec![EinsteinBase::FlatTorus(2)]),
            FamilySpec::Sphere2 => Some(vec![EinsteinBase::Sphere(2)]),
            FamilySpec::Sphere3 => Some(vec![EinsteinBase::Sphere(3)]),
            FamilySpec::Hyperbolic2 => Some(vec![EinsteinBase::Hyperbolic(2)]),
            FamilySpec::S2xS2 => Some(vec![EinsteinBase::Sphere(2), EinsteinBase::Sphere(2)]),
            _ => None,
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilySpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        FamilySpec::ALL.into_iter().find(|f| f.name() == s.trim()).ok_or_else(|| {
            let names: Vec<&str> = FamilySpec::ALL.iter().map(FamilySpec::name).collect();
            CliError::Config(format!("unknown family `{s}` (expected one of {})", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Summary,
}

impl FromStr for OutputFormat {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "csv" => Ok(OutputFormat::Csv),
            "summary" => Ok(OutputFormat::Summary),
            other => Err(CliError::Config(format!("unknown format `{other}` (expected csv or summary)"))),
        }
    }
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Summary => "json",
        }
    }
}

/// Keys accepted in a configuration file. Every field is optional; flags
/// override file values.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub family: Option<String>,
    pub map: Option<String>,
    pub dt: Option<f64>,
    pub step: Option<f64>,
    pub horizon: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub point: Option<Vec<f64>>,
    pub time: Option<f64>,
    pub grid: Option<usize>,
    pub initial: Option<Vec<f64>>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
    }

    /// `self` with every value present in `flags` replaced.
    pub fn overridden_by(self, flags: FileConfig) -> FileConfig {
        FileConfig {
            family: flags.family.or(self.family),
            map: flags.map.or(self.map),
            dt: flags.dt.or(self.dt),
            step: flags.step.or(self.step),
            horizon: flags.horizon.or(self.horizon),
            seed: flags.seed.or(self.seed),
            out: flags.out.or(self.out),
            format: flags.format.or(self.format),
            point: flags.point.or(self.point),
            time: flags.time.or(self.time),
            grid: flags.grid.or(self.grid),
            initial: flags.initial.or(self.initial),
        }
    }
}

/// Validated configuration of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub family: FamilySpec,
    pub map: FlowMap,
    pub dt: f64,
    /// Integration step; `None` picks the family default.
    pub step: Option<f64>,
    pub horizon: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub format: OutputFormat,
    pub point: Option<Vec<f64>>,
    pub time: f64,
    pub grid: usize,
    pub initial: Option<Vec<f64>>,
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be positive, got {v}")))
    }
}

impl RunConfig {
    pub fn from_file_config(c: FileConfig, out_dir: Option<PathBuf>) -> Result<Self, CliError> {
        let family = c.family.as_deref().unwrap_or("sphere2").parse()?;
        let map = c
            .map
            .as_deref()
            .unwrap_or("ricci")
            .parse::<FlowMap>()
            .map_err(|e| CliError::Config(e.to_string()))?;
        let grid = c.grid.unwrap_or(MIN_GRID);
        if grid < MIN_GRID {
            return Err(CliError::Config(format!("grid must be at least {MIN_GRID}, got {grid}")));
        }
        let time = c.time.unwrap_or(0.0);
        if !time.is_finite() {
            return Err(CliError::Config(format!("time must be finite, got {time}")));
        }
        if let Some(init) = &c.initial {
            for &a in init {
                positive("initial coefficient", a)?;
            }
        }
        Ok(RunConfig {
            family,
            map,
            dt: positive("dt", c.dt.unwrap_or(crate::verify::DEFAULT_DT))?,
            step: c.step.map(|s| positive("step", s)).transpose()?,
            horizon: positive("horizon", c.horizon.unwrap_or(1.0))?,
            seed: c.seed.unwrap_or(0),
            out: c.out,
            out_dir,
            format: c.format.as_deref().unwrap_or("csv").parse()?,
            point: c.point,
            time,
            grid,
            initial: c.initial,
        })
    }

    fn initial_for(&self, count: usize, default: &[f64]) -> Result<Vec<f64>, CliError> {
        match &self.initial {
            None => Ok(default.to_vec()),
            Some(v) if v.len() == count => Ok(v.clone()),
            Some(v) => Err(CliError::Config(format!(
                "family {} takes {count} initial coefficients, got {}",
                self.family,
                v.len()
            ))),
        }
    }

    fn grid_family(&self) -> Result<ConformalGridFamily, CliError> {
        let u0 = grid::sample_lattice(self.grid, |x, y| {
            0.1 * (2.0 * PI * x).sin() + 0.05 * (2.0 * PI * y).cos()
        });
        let fam = ConformalGridFamily::new(self.grid, u0, self.map)?;
        Ok(match self.step {
            Some(h) => fam.with_step(h),
            None => fam,
        })
    }

    /// Family used for pointwise quantities and verification: closed forms
    /// where available, the coefficient ODE for products.
    pub fn family(&self) -> Result<MetricFamily, CliError> {
        Ok(match self.family {
            FamilySpec::S2xS2 => {
                let init = self.initial_for(2, &[1.0, 2.0])?;
                let blocks = [(EinsteinBase::Sphere(2), init[0]), (EinsteinBase::Sphere(2), init[1])];
                ansatz_ode_family(&blocks, self.map)?
            }
            FamilySpec::WrongSphere2 => wrong_sphere_family(),
            FamilySpec::WarpedSphere2 => warped_sphere_family(),
            FamilySpec::ConformalTorus => MetricFamily::ConformalGrid(self.grid_family()?),
            spec => {
                self.initial_for(1, &[1.0])?;
                let base = spec.blocks().expect("single Einstein block")[0];
                exact_einstein_family(base, self.map)?
            }
        })
    }

    /// Family integrated by the `flow` command: Einstein families through
    /// their coefficient ODE, the others as [`RunConfig::family`].
    pub fn flow_family(&self) -> Result<MetricFamily, CliError> {
        match self.family.blocks() {
            Some(bases) => {
                let default: Vec<f64> = if bases.len() == 2 { vec![1.0, 2.0] } else { vec![1.0] };
                let init = self.initial_for(bases.len(), &default)?;
                let blocks: Vec<(EinsteinBase, f64)> = bases.into_iter().zip(init).collect();
                Ok(ansatz_ode_family(&blocks, self.map)?)
            }
            None => self.family(),
        }
    }

    /// Step for `flow`: the configured one, else 0.1 (0.2/N² on the grid).
    pub fn flow_step(&self) -> f64 {
        self.step.unwrap_or(match self.family {
            FamilySpec::ConformalTorus => 0.2 / (self.grid * self.grid) as f64,
            _ => 0.1,
        })
    }

    /// `--point` if given, else the chart's sample points.
    pub fn points(&self, family: &MetricFamily) -> Result<Vec<Point>, CliError> {
        match &self.point {
            Some(p) => {
                let p = Point::new(p.clone());
                family.chart().check(&p)?;
                Ok(vec![p])
            }
            None => Ok(family.chart().sample_points(self.seed)),
        }
    }
}
