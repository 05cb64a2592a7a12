//! JSON file formats: module descriptors, matrix files (finite and banded,
//! with an optional duality orientation header), idempotent family files
//! with member references, presentations of finitely generated discrete
//! modules, and scenario reports. All writes are atomic.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::covers::{FgDiscreteModule, Side};
use crate::duality::DualityDirection;
use crate::endo::{Band, Body, EndoElement, PatternMatrix};
use crate::error::{Error, Result};
use crate::idem::{IdempotentFamily, TemplateTail};
use crate::module::{DecomposedModule, LocalModule};
use crate::scalar::{AdicScalar, Backend, RingDescriptor};

// ---------------------------------------------------------------------------
// ring and module descriptors

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RingJson {
    pub p: u64,
    #[serde(rename = "N")]
    pub n: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SummandJson {
    pub torsion: usize,
}

/// `{"ring": {"p": 2, "N": 4}, "summands": [{"torsion": 1}, …]}` or
/// `{"pattern": "free^omega", "p": 2}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModuleFile {
    Finite { ring: RingJson, summands: Vec<SummandJson> },
    Pattern { pattern: String, p: u64 },
}

impl ModuleFile {
    pub fn from_module(m: &DecomposedModule) -> Self {
        match m.ring.backend {
            Backend::Truncated => ModuleFile::Finite {
                ring: RingJson { p: m.ring.prime, n: m.ring.precision },
                summands: m
                    .finite_summands()
                    .iter()
                    .map(|s| SummandJson {
                        torsion: match s {
                            LocalModule::Torsion(k) => *k,
                            LocalModule::Free => unreachable!("no free truncated summands"),
                        },
                    })
                    .collect(),
            },
            Backend::Pattern => {
                ModuleFile::Pattern { pattern: "free^omega".into(), p: m.ring.prime }
            }
        }
    }

    pub fn to_module(&self) -> Result<DecomposedModule> {
        match self {
            ModuleFile::Finite { ring, summands } => {
                if ring.n < 1 {
                    return Err(Error::Parse("precision must be at least 1".into()));
                }
                let r = RingDescriptor::truncated(ring.p, ring.n);
                let locals = summands
                    .iter()
                    .map(|s| {
                        if s.torsion < 1 || s.torsion > ring.n {
                            Err(Error::Parse(format!(
                                "torsion exponent {} out of range 1..={}",
                                s.torsion, ring.n
                            )))
                        } else {
                            Ok(LocalModule::Torsion(s.torsion))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                if locals.is_empty() {
                    return Err(Error::Parse("a module needs at least one summand".into()));
                }
                DecomposedModule::finite(r, locals)
            }
            ModuleFile::Pattern { pattern, p } => {
                if pattern != "free^omega" {
                    return Err(Error::Parse(format!("unknown pattern module {pattern:?}")));
                }
                DecomposedModule::free_omega(RingDescriptor::pattern(*p))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// matrices

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BandJson {
    pub offset: i64,
    pub entry: String,
    pub from: usize,
}

/// Orientation header for duality matrices: which index set labels rows.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct OrientationJson {
    pub rows: String,
    pub cols: String,
}

impl OrientationJson {
    pub fn for_direction(d: DualityDirection) -> Self {
        match d {
            // contramodule generators label the rows
            DualityDirection::ContraToProd => OrientationJson { rows: "Y".into(), cols: "X".into() },
            DualityDirection::ProdToContra => OrientationJson { rows: "X".into(), cols: "Y".into() },
        }
    }

    pub fn direction(&self) -> Result<DualityDirection> {
        match (self.rows.as_str(), self.cols.as_str()) {
            ("Y", "X") => Ok(DualityDirection::ContraToProd),
            ("X", "Y") => Ok(DualityDirection::ProdToContra),
            _ => Err(Error::Parse("orientation must pair \"X\" with \"Y\"".into())),
        }
    }

    pub fn flip(&self) -> Self {
        OrientationJson { rows: self.cols.clone(), cols: self.rows.clone() }
    }
}

/// Finite matrices carry `entries`; banded matrices carry `bands`/`sparse`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub module: ModuleFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bands: Option<Vec<BandJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sparse: Option<Vec<(usize, usize, String)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orientation: Option<OrientationJson>,
}

impl MatrixFile {
    pub fn from_element(e: &EndoElement) -> Self {
        let module = ModuleFile::from_module(&e.module);
        match &e.body {
            Body::Finite(entries) => MatrixFile {
                module,
                entries: Some(
                    entries
                        .iter()
                        .map(|row| row.iter().map(|x| x.to_string()).collect())
                        .collect(),
                ),
                bands: None,
                sparse: None,
                orientation: None,
            },
            Body::Pattern(m) => MatrixFile {
                module,
                entries: None,
                bands: Some(
                    m.bands
                        .iter()
                        .map(|b| BandJson {
                            offset: b.offset,
                            entry: b.entry.to_string(),
                            from: b.from,
                        })
                        .collect(),
                ),
                sparse: Some(
                    m.sparse
                        .iter()
                        .map(|(j, i, x)| (*j, *i, x.to_string()))
                        .collect(),
                ),
                orientation: None,
            },
        }
    }

    pub fn to_element(&self) -> Result<EndoElement> {
        let module = self.module.to_module()?;
        let ring = module.ring;
        if let Some(entries) = &self.entries {
            let parsed = entries
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|s| AdicScalar::parse(ring, s))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            return EndoElement::from_entries(module, parsed);
        }
        let mut m = PatternMatrix::zero(ring);
        for b in self.bands.iter().flatten() {
            m.bands.push(Band {
                offset: b.offset,
                entry: AdicScalar::parse(ring, &b.entry)?,
                from: b.from,
            });
        }
        for (j, i, s) in self.sparse.iter().flatten() {
            m.sparse.push((*j, *i, AdicScalar::parse(ring, s)?));
        }
        Ok(EndoElement::from_pattern(module, m))
    }
}

// ---------------------------------------------------------------------------
// idempotent families

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TailJson {
    pub templates: Vec<(i64, i64, String)>,
    pub from: usize,
}

/// Family file: head members by relative file reference, optional banded
/// tail, and the completeness flag.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyFile {
    pub module: ModuleFile,
    pub members: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailJson>,
    pub complete: bool,
}

/// Write a family: one matrix file per head member next to the family file.
pub fn write_family(path: &Path, family: &IdempotentFamily) -> Result<Vec<PathBuf>> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("family")
        .to_string();
    let mut artifacts = Vec::new();
    let mut members = Vec::new();
    for (i, e) in family.head.iter().enumerate() {
        let name = format!("{stem}_member_{i}.json");
        let member_path = dir.join(&name);
        write_json(&member_path, &MatrixFile::from_element(e))?;
        artifacts.push(member_path);
        members.push(name);
    }
    let tail = family.tail.as_ref().map(|t| TailJson {
        templates: t
            .templates
            .iter()
            .map(|(r, c, v)| (*r, *c, v.to_string()))
            .collect(),
        from: t.from,
    });
    let file = FamilyFile {
        module: ModuleFile::from_module(&family.module),
        members,
        tail,
        complete: family.complete,
    };
    write_json(path, &file)?;
    artifacts.push(path.to_path_buf());
    Ok(artifacts)
}

/// Load a family file, resolve member references, and re-validate the
/// orthogonality/locality invariants.
pub fn read_family(path: &Path) -> Result<IdempotentFamily> {
    let file: FamilyFile = read_json(path)?;
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let module = file.module.to_module()?;
    let ring = module.ring;
    let mut head = Vec::new();
    for name in &file.members {
        let e = read_matrix(&dir.join(name))?;
        if e.module != module {
            return Err(Error::Parse(format!("member {name} is over a different module")));
        }
        head.push(e);
    }
    let tail = match file.tail {
        None => None,
        Some(t) => Some(TemplateTail {
            templates: t
                .templates
                .iter()
                .map(|(r, c, v)| Ok((*r, *c, AdicScalar::parse(ring, v)?)))
                .collect::<Result<Vec<_>>>()?,
            from: t.from,
        }),
    };
    let family = IdempotentFamily { module, head, tail, complete: file.complete };
    family.validate()?;
    Ok(family)
}

// ---------------------------------------------------------------------------
// finitely generated discrete modules

/// `{"module": …, "generators": […], "relations": [[…]], "side": "right"}`;
/// generators and relation components are inline finite matrices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FgModuleFile {
    pub module: ModuleFile,
    pub generators: Vec<Vec<Vec<String>>>,
    pub relations: Vec<Vec<Vec<Vec<String>>>>,
    pub side: String,
}

impl FgModuleFile {
    pub fn from_fg(fg: &FgDiscreteModule) -> Self {
        let to_entries = |e: &EndoElement| -> Vec<Vec<String>> {
            e.entries()
                .iter()
                .map(|row| row.iter().map(|x| x.to_string()).collect())
                .collect()
        };
        FgModuleFile {
            module: ModuleFile::from_module(&fg.ambient),
            generators: fg.generators.iter().map(to_entries).collect(),
            relations: fg
                .relations
                .iter()
                .map(|rel| rel.iter().map(to_entries).collect())
                .collect(),
            side: match fg.side {
                Side::Right => "right".into(),
                Side::Left => "left".into(),
            },
        }
    }

    pub fn to_fg(&self) -> Result<FgDiscreteModule> {
        let module = self.module.to_module()?;
        let ring = module.ring;
        let parse_entries = |entries: &Vec<Vec<String>>| -> Result<EndoElement> {
            let parsed = entries
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|s| AdicScalar::parse(ring, s))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            EndoElement::from_entries(module.clone(), parsed)
        };
        let generators = self.generators.iter().map(parse_entries).collect::<Result<Vec<_>>>()?;
        let relations = self
            .relations
            .iter()
            .map(|rel| rel.iter().map(parse_entries).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let side = match self.side.as_str() {
            "right" => Side::Right,
            "left" => Side::Left,
            other => return Err(Error::Parse(format!("unknown side {other:?}"))),
        };
        FgDiscreteModule::new(module, generators, relations, side)
    }
}

// ---------------------------------------------------------------------------
// scenario reports

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClaimJson {
    pub claim: String,
    pub outcome: bool,
    pub witness: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub claims: Vec<ClaimJson>,
    pub artifacts: Vec<String>,
}

impl ScenarioReport {
    pub fn all_true(&self) -> bool {
        self.claims.iter().all(|c| c.outcome)
    }
}

// ---------------------------------------------------------------------------
// plumbing

/// Serialize to a sibling temp file, then rename into place.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let body = serde_json::to_string_pretty(value)?;
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    if !dir.as_os_str().is_empty() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, body.as_bytes())?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let body = fs::read_to_string(path)?;
    serde_json::from_str(&body).map_err(Error::from)
}

pub fn read_matrix(path: &Path) -> Result<EndoElement> {
    let file: MatrixFile = read_json(path)?;
    file.to_element()
}

pub fn write_matrix(path: &Path, e: &EndoElement) -> Result<()> {
    write_json(path, &MatrixFile::from_element(e))
}
