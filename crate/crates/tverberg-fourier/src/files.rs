//! Stable JSON file formats: maps, plans, configurations, reports, oracle
//! outputs, and the run manifest embedded in every artifact.
//!
//! Floating values are printed with 17 significant digits (scientific
//! notation), enough to reproduce every `f64` bit pattern, so artifacts can
//! be compared byte for byte in golden-file tests. Field order is fixed by
//! the struct definitions; loading and re-serializing a file is the
//! identity.

use std::collections::BTreeMap;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::geometry::{Configuration, FourierReport, PointPlacement, PostMap, SimplexMap, SupportCase};
use crate::group::Character;
use crate::obstruction::ObstructionPoly;
use crate::oracle::{RadonPartition, TverbergPartition};
use crate::planner::{
    CoincidenceSchedule, LemmaRoute, PartitionPlan, PlanError, PointIndexing, Theorem,
};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("parse error in {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("inconsistent file: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Plan(#[from] PlanError),
}

// ---------------------------------------------------------------------------
// 17-significant-digit JSON
// ---------------------------------------------------------------------------

/// Pretty JSON with floats at full precision: `{:.16e}` gives 17 significant
/// digits, which pins down every finite `f64` exactly.
struct Sig17Pretty<'a>(PrettyFormatter<'a>);

impl Formatter for Sig17Pretty<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes any artifact with the canonical float formatting.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut out, Sig17Pretty(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("artifact types serialize infallibly");
    let mut s = String::from_utf8(out).expect("serde_json emits utf-8");
    s.push('\n');
    s
}

pub fn save<T: Serialize>(path: &Path, value: &T) -> Result<(), FileError> {
    std::fs::write(path, to_canonical_json(value))
        .map_err(|source| FileError::Io { path: path.display().to_string(), source })
}

pub fn load<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, FileError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| FileError::Io { path: path.display().to_string(), source })?;
    serde_json::from_str(&text)
        .map_err(|source| FileError::Parse { path: path.display().to_string(), source })
}

/// Hex SHA-256 of a file, recorded in manifests.
pub fn digest_file(path: &Path) -> Result<String, FileError> {
    let bytes = std::fs::read(path)
        .map_err(|source| FileError::Io { path: path.display().to_string(), source })?;
    Ok(hex::encode(Sha256::digest(bytes)))
}

// ---------------------------------------------------------------------------
// Run manifest
// ---------------------------------------------------------------------------

/// Provenance block embedded in every output artifact. The payload of an
/// artifact is a pure function of `(command, parameters, seed, inputs)`;
/// only `wall_clock_ms` varies between identical reruns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub input_digests: BTreeMap<String, String>,
    pub wall_clock_ms: u64,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            parameters: BTreeMap::new(),
            seed: None,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            input_digests: BTreeMap::new(),
            wall_clock_ms: 0,
        }
    }

    pub fn with_param<T: Serialize>(mut self, key: &str, value: T) -> Self {
        self.parameters
            .insert(key.to_string(), serde_json::to_value(value).expect("parameter serializes"));
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_input(mut self, path: &Path) -> Result<Self, FileError> {
        self.input_digests.insert(path.display().to_string(), digest_file(path)?);
        Ok(self)
    }
}

// ---------------------------------------------------------------------------
// Map file
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PostMapSpec {
    Affine { matrix: Vec<Vec<f64>>, offset: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapFile {
    pub n: usize,
    pub d: usize,
    pub vertices: Vec<Vec<f64>>,
    pub post_map: Option<PostMapSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<RunManifest>,
}

impl MapFile {
    pub fn from_map(map: &SimplexMap, manifest: Option<RunManifest>) -> Self {
        let post_map = match map.post_map() {
            PostMap::Identity => None,
            PostMap::Affine { matrix, offset } => {
                Some(PostMapSpec::Affine { matrix: matrix.clone(), offset: offset.clone() })
            }
            PostMap::Custom(_) => None, // programmatic evaluators have no file form
        };
        Self {
            n: map.n(),
            d: map.d(),
            vertices: map.vertex_images().to_vec(),
            post_map,
            manifest,
        }
    }

    pub fn instantiate(&self) -> Result<SimplexMap, FileError> {
        let map = SimplexMap::new(self.vertices.clone())
            .map_err(|e| FileError::Inconsistent(e.to_string()))?;
        if map.n() != self.n || map.d() != self.d {
            return Err(FileError::Inconsistent(format!(
                "declared n = {}, d = {} but vertices give n = {}, d = {}",
                self.n,
                self.d,
                map.n(),
                map.d()
            )));
        }
        Ok(match &self.post_map {
            None => map,
            Some(PostMapSpec::Affine { matrix, offset }) => {
                if matrix.len() != self.d
                    || matrix.iter().any(|r| r.len() != self.d)
                    || offset.len() != self.d
                {
                    return Err(FileError::Inconsistent("post-map shape mismatch".into()));
                }
                map.with_post_map(PostMap::Affine { matrix: matrix.clone(), offset: offset.clone() })
            }
        })
    }
}

// ---------------------------------------------------------------------------
// Plan file
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanFile {
    pub theorem: Theorem,
    pub p: u32,
    pub k: u32,
    pub r: u32,
    pub a: u32,
    pub d: u32,
    pub n: usize,
    pub q: u64,
    pub q_prime: usize,
    pub m: usize,
    pub m_prime: usize,
    pub n_tight: usize,
    pub orders: Vec<u32>,
    pub annihilated: Vec<Vec<u32>>,
    pub representatives: Vec<Vec<u32>>,
    pub indexing: PointIndexing,
    /// Point index -> group element coordinates.
    pub points: Vec<Vec<u32>>,
    pub schedule: CoincidenceSchedule,
    pub route: LemmaRoute,
    pub certificate: String,
    pub orientable: Option<bool>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<RunManifest>,
}

fn exps(cs: &[Character]) -> Vec<Vec<u32>> {
    cs.iter().map(|c| c.exponents().to_vec()).collect()
}

impl PlanFile {
    pub fn from_plan(
        plan: &PartitionPlan,
        schedule: CoincidenceSchedule,
        manifest: Option<RunManifest>,
    ) -> Self {
        Self {
            theorem: plan.theorem(),
            p: plan.p(),
            k: plan.k(),
            r: plan.r(),
            a: plan.a(),
            d: plan.d(),
            n: plan.n(),
            q: plan.q(),
            q_prime: plan.q_prime(),
            m: plan.m(),
            m_prime: plan.m_prime(),
            n_tight: plan.tight_dimension(),
            orders: plan.group().orders().to_vec(),
            annihilated: exps(plan.annihilated()),
            representatives: exps(plan.representatives()),
            indexing: plan.indexing(),
            points: plan.point_elements().iter().map(|g| g.coords().to_vec()).collect(),
            schedule,
            route: plan.route(),
            certificate: plan.certificate().canonical_text(),
            orientable: plan.bundle_orientable(),
            warnings: plan.warnings().to_vec(),
            manifest,
        }
    }

    /// Rebuilds the plan from its parameters and cross-checks the stored
    /// derived fields, so stale or hand-edited files are caught.
    pub fn instantiate(&self) -> Result<PartitionPlan, FileError> {
        let plan = match self.theorem {
            Theorem::Subgroup => PartitionPlan::subgroup(self.p, self.k, self.r, self.a, self.d)?,
            Theorem::Blocks => PartitionPlan::blocks(self.p, self.k, self.r, self.d)?,
        };
        if plan.group().orders() != self.orders.as_slice() {
            return Err(FileError::Inconsistent("orders do not match plan parameters".into()));
        }
        if plan.n() != self.n || plan.q() != self.q || plan.q_prime() != self.q_prime {
            return Err(FileError::Inconsistent(
                "derived dimensions do not match plan parameters".into(),
            ));
        }
        if exps(plan.annihilated()) != self.annihilated {
            return Err(FileError::Inconsistent("annihilated set does not match".into()));
        }
        Ok(plan)
    }
}

// ---------------------------------------------------------------------------
// Configuration file
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigGroupEntry {
    /// Plan point index.
    pub index: usize,
    pub support: Vec<usize>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigFile {
    pub orders: Vec<u32>,
    pub groups: Vec<ConfigGroupEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<RunManifest>,
}

impl ConfigFile {
    pub fn from_configuration(config: &Configuration, manifest: Option<RunManifest>) -> Self {
        Self {
            orders: config.orders.clone(),
            groups: config
                .points
                .iter()
                .enumerate()
                .map(|(index, p)| ConfigGroupEntry {
                    index,
                    support: p.support.clone(),
                    weights: p.weights.clone(),
                })
                .collect(),
            manifest,
        }
    }

    pub fn instantiate(&self) -> Result<Configuration, FileError> {
        let q = self.groups.len();
        let mut points: Vec<Option<PointPlacement>> = vec![None; q];
        for entry in &self.groups {
            if entry.index >= q {
                return Err(FileError::Inconsistent(format!(
                    "group index {} out of range 0..{q}",
                    entry.index
                )));
            }
            if points[entry.index].is_some() {
                return Err(FileError::Inconsistent(format!(
                    "duplicate group index {}",
                    entry.index
                )));
            }
            points[entry.index] = Some(PointPlacement {
                support: entry.support.clone(),
                weights: entry.weights.clone(),
            });
        }
        Ok(Configuration {
            orders: self.orders.clone(),
            points: points
                .into_iter()
                .map(|p| p.expect("every index present exactly once"))
                .collect(),
        })
    }
}

// ---------------------------------------------------------------------------
// Report file
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientEntry {
    pub character: Vec<u32>,
    /// Per target coordinate: `[re, im]`.
    pub coeffs: Vec<[f64; 2]>,
    pub annihilated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub residual: f64,
    pub objective_residual: f64,
    pub max_annihilated_coeff: f64,
    pub guarantee_bound: f64,
    pub equality_deviations: Vec<f64>,
    pub orbit_deviations: Vec<f64>,
    pub block_deviation: Option<f64>,
    pub alternating_sum_deviation: Option<f64>,
    pub max_coincidence_deviation: f64,
    pub support_profile: Vec<usize>,
    pub support_case: Option<SupportCase>,
    pub spectrum: Vec<CoefficientEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assignment: Option<Vec<u8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<RunManifest>,
}

impl ReportFile {
    pub fn from_report(
        report: &FourierReport,
        plan: &PartitionPlan,
        manifest: Option<RunManifest>,
    ) -> Self {
        let spec = plan.group();
        let annihilated: std::collections::BTreeSet<&Character> =
            plan.annihilated().iter().collect();
        let spectrum = spec
            .enumerate_characters()
            .iter()
            .map(|eps| CoefficientEntry {
                character: eps.exponents().to_vec(),
                coeffs: (0..report.spectrum.dimension())
                    .map(|i| {
                        let c = report.spectrum.coeff(i, eps);
                        [c.re, c.im]
                    })
                    .collect(),
                annihilated: annihilated.contains(eps),
            })
            .collect();
        Self {
            residual: report.residual,
            objective_residual: report.objective_residual,
            max_annihilated_coeff: report.max_annihilated_coeff,
            guarantee_bound: report.guarantee_bound,
            equality_deviations: report.equality_deviations.clone(),
            orbit_deviations: report.orbit_deviations.clone(),
            block_deviation: report.block_deviation,
            alternating_sum_deviation: report.alternating_sum_deviation,
            max_coincidence_deviation: report.max_coincidence_deviation,
            support_profile: report.support_profile.clone(),
            support_case: report.support_case,
            spectrum,
            converged: None,
            assignment: None,
            manifest,
        }
    }
}

// ---------------------------------------------------------------------------
// Oracle files
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointsFile {
    pub d: usize,
    pub points: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleFile {
    Radon {
        partition: RadonPartition,
        #[serde(skip_serializing_if = "Option::is_none")]
        manifest: Option<RunManifest>,
    },
    Tverberg {
        q: usize,
        partition: Option<TverbergPartition>,
        #[serde(skip_serializing_if = "Option::is_none")]
        manifest: Option<RunManifest>,
    },
}

/// Character list input for the obstruction command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharactersFile {
    pub characters: Vec<Vec<u32>>,
}

/// Output of the obstruction command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstructionReportFile {
    pub orders: Vec<u32>,
    pub d: u32,
    pub m: usize,
    /// Integral route: polynomial text, verdict, and the guaranteed simplex
    /// dimension `2dm + q − 1`.
    pub chern_polynomial: String,
    pub chern_nonzero: bool,
    pub chern_dimension: usize,
    /// Mod-2 route, present when `d` is odd and the group has even factors.
    pub sw_polynomial: Option<String>,
    pub sw_nonzero: Option<bool>,
    pub sw_dimension: Option<usize>,
    pub m_prime: Option<usize>,
    pub orientable: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<RunManifest>,
}

/// Shared helper: render either obstruction polynomial for reports.
pub fn certificate_text(poly: &ObstructionPoly) -> String {
    poly.canonical_text()
}
