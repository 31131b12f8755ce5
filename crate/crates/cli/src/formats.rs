//! TOML input formats: scenarios, complexes, actions, covers and weight files.
//! The grammar is documented in `docs/formats.md`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use coinvariant::action::{simplicial_generator, CochainAction, Generator, Relation, SignedPermutation};
use coinvariant::builders;
use coinvariant::catalog;
use coinvariant::complex::{Cell, CellComplex, CellShape, Orientation};
use coinvariant::cover::{CoverFamily, LiftEntry, PeriodicCover};
use coinvariant::hodge::InnerProduct;
use coinvariant::linalg::{parse_rational, Rational};

use crate::CliError;

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    FiniteAction,
    Hodge,
    Cover,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::FiniteAction => "finite-action",
            Kind::Hodge => "hodge",
            Kind::Cover => "cover",
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Cutoff {
    Domain,
    Split,
}

impl Cutoff {
    pub fn as_str(self) -> &'static str {
        match self {
            Cutoff::Domain => "domain",
            Cutoff::Split => "split",
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Record,
    Table,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    pub max_degree: Option<usize>,
    pub window_radius: Option<usize>,
    pub cutoff: Option<Cutoff>,
    pub format: Option<Format>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: Option<String>,
    pub kind: Kind,
    pub complex: Option<String>,
    pub action: Option<String>,
    pub cover: Option<String>,
    pub weights: Option<String>,
    #[serde(default)]
    pub operations: Vec<String>,
    #[serde(default)]
    pub parameters: Parameters,
    /// Directory that relative references resolve against.
    #[serde(skip)]
    pub base: PathBuf,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T, CliError> {
    toml::from_str(text).map_err(|e| CliError::Parse { file: path.display().to_string(), message: e.to_string() })
}

pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let mut s: Scenario = parse(path, &read(path)?)?;
    s.base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    if s.name.is_none() {
        s.name = path.file_stem().map(|x| x.to_string_lossy().into_owned());
    }
    Ok(s)
}

/// Scenario for a bundled action, cover or complex name.
pub fn bundled_scenario(name: &str) -> Option<Scenario> {
    let mut s = Scenario {
        name: Some(name.to_string()),
        kind: Kind::FiniteAction,
        complex: None,
        action: None,
        cover: None,
        weights: None,
        operations: Vec::new(),
        parameters: Parameters::default(),
        base: PathBuf::new(),
    };
    if catalog::action(name).is_some() {
        s.action = Some(name.into());
    } else if catalog::cover(name).is_some() {
        s.kind = Kind::Cover;
        s.cover = Some(name.into());
    } else {
        let c = name.strip_prefix("hodge-").filter(|c| catalog::complex(c).is_some())?;
        s.kind = Kind::Hodge;
        s.complex = Some(c.into());
    }
    Some(s)
}

pub fn bundled_scenario_names() -> Vec<String> {
    let mut out = Vec::new();
    for e in catalog::entries(None) {
        match e.kind {
            catalog::EntryKind::Complex => out.push(format!("hodge-{}", e.name)),
            _ => out.push(e.name.to_string()),
        }
    }
    out
}

fn is_path(reference: &str) -> bool {
    reference.ends_with(".toml") || reference.contains('/')
}

fn resolve(base: &Path, reference: &str) -> PathBuf {
    let p = Path::new(reference);
    if p.is_absolute() { p.to_path_buf() } else { base.join(p) }
}

// complex files

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexFile {
    name: Option<String>,
    orientation: Option<String>,
    /// Simplicial shortcut: maximal simplices by vertex labels.
    facets: Option<Vec<Vec<usize>>>,
    /// Cell ids per degree.
    cells: Option<Vec<Vec<usize>>>,
    /// `[face, coface, coefficient]`
    #[serde(default)]
    incidence: Vec<[i64; 3]>,
}

pub fn load_complex(base: &Path, reference: &str) -> Result<CellComplex, CliError> {
    if !is_path(reference) {
        return catalog::complex(reference).ok_or_else(|| CliError::Input(format!("unknown complex `{reference}`")));
    }
    let path = resolve(base, reference);
    let f: ComplexFile = parse(&path, &read(&path)?)?;
    complex_from_file(&path, f)
}

fn complex_from_file(path: &Path, f: ComplexFile) -> Result<CellComplex, CliError> {
    let name = f.name.unwrap_or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
    let field = |field: &str, message: String| CliError::Parse { file: path.display().to_string(), message: format!("{field}: {message}") };
    match (f.facets, f.cells) {
        (Some(facets), None) => Ok(builders::simplicial(&name, &facets)),
        (None, Some(cells)) => {
            let orientation = match f.orientation.as_deref().unwrap_or("explicit") {
                "simplicial" => Orientation::Simplicial,
                "cubical" => Orientation::Cubical,
                "explicit" => Orientation::Explicit,
                other => return Err(field("orientation", format!("unknown orientation `{other}`"))),
            };
            let cells: Vec<Cell> = cells
                .iter()
                .enumerate()
                .flat_map(|(p, ids)| ids.iter().map(move |&id| Cell { id, degree: p, shape: CellShape::Abstract }))
                .collect();
            let mut incidence = Vec::new();
            for (i, [a, b, k]) in f.incidence.iter().enumerate() {
                if *a < 0 || *b < 0 {
                    return Err(field(&format!("incidence[{i}]"), "cell ids must be non-negative".into()));
                }
                incidence.push((*a as usize, *b as usize, *k));
            }
            CellComplex::new(name, orientation, cells, &incidence).map_err(|e| field("complex", e.to_string()))
        }
        _ => Err(field("complex", "give exactly one of `facets` or `cells`".into())),
    }
}

// action files

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActionFile {
    name: Option<String>,
    complex: String,
    order: Option<usize>,
    #[serde(default)]
    relations: Vec<String>,
    #[serde(default)]
    free_abelian: bool,
    generators: Vec<GeneratorFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorFile {
    name: String,
    /// Images of vertex labels, for simplicial complexes.
    vertex_map: Option<Vec<usize>>,
    /// Per degree, `[cell, image cell, sign]` entries.
    maps: Option<Vec<Vec<[i64; 3]>>>,
}

/// Words like `a^2*b*a^-1`.
pub fn parse_relation(text: &str, names: &[String]) -> Result<Relation, String> {
    let mut factors = Vec::new();
    for token in text.split('*').map(str::trim) {
        let (g, e) = match token.split_once('^') {
            Some((g, e)) => (g.trim(), e.trim().parse::<i64>().map_err(|_| format!("bad exponent in `{token}`"))?),
            None => (token, 1),
        };
        let i = names.iter().position(|n| n == g).ok_or_else(|| format!("unknown generator `{g}`"))?;
        factors.push((i, e));
    }
    Ok(Relation { label: text.trim().to_string(), factors })
}

pub fn load_action(base: &Path, reference: &str) -> Result<(CellComplex, CochainAction), CliError> {
    if !is_path(reference) {
        return catalog::action(reference).ok_or_else(|| CliError::Input(format!("unknown action `{reference}`")));
    }
    let path = resolve(base, reference);
    let f: ActionFile = parse(&path, &read(&path)?)?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let k = load_complex(&dir, &f.complex)?;
    let file = path.display().to_string();
    let bad = |message: String| CliError::Parse { file: file.clone(), message };
    let mut generators = Vec::new();
    for g in &f.generators {
        let gen = match (&g.vertex_map, &g.maps) {
            (Some(vm), None) => simplicial_generator(&k, &g.name, vm)?,
            (None, Some(maps)) => generator_from_maps(&k, &g.name, maps).map_err(|m| bad(format!("generator {}: {m}", g.name)))?,
            _ => return Err(bad(format!("generator {}: give exactly one of `vertex_map` or `maps`", g.name))),
        };
        generators.push(gen);
    }
    let names: Vec<String> = generators.iter().map(|g| g.name.clone()).collect();
    let relations =
        f.relations.iter().map(|r| parse_relation(r, &names)).collect::<Result<Vec<_>, _>>().map_err(|m| bad(format!("relations: {m}")))?;
    let name = f.name.unwrap_or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
    let action = if f.free_abelian {
        CochainAction::free_abelian(name, &k, generators)?
    } else {
        CochainAction::finite(name, &k, generators, &relations, f.order)?
    };
    Ok((k, action))
}

fn generator_from_maps(k: &CellComplex, name: &str, maps: &[Vec<[i64; 3]>]) -> Result<Generator, String> {
    if maps.len() != k.dim() + 1 {
        return Err(format!("maps given for {} degrees, complex has {}", maps.len(), k.dim() + 1));
    }
    let mut out = Vec::new();
    for (p, entries) in maps.iter().enumerate() {
        let n = k.num_cells(p);
        let mut target = vec![usize::MAX; n];
        let mut sign = vec![0i8; n];
        for [src, tgt, s] in entries {
            let locate = |id: i64| -> Result<usize, String> {
                usize::try_from(id)
                    .ok()
                    .and_then(|id| k.locate(id))
                    .filter(|(q, _)| *q == p)
                    .map(|(_, pos)| pos)
                    .ok_or_else(|| format!("degree {p}: {id} is not a cell of degree {p}"))
            };
            let (i, j) = (locate(*src)?, locate(*tgt)?);
            if target[i] != usize::MAX {
                return Err(format!("degree {p}: cell {src} mapped twice"));
            }
            target[i] = j;
            sign[i] = i8::try_from(*s).map_err(|_| format!("degree {p}: sign {s}"))?;
        }
        if let Some(i) = target.iter().position(|&t| t == usize::MAX) {
            return Err(format!("degree {p}: cell {} has no image", k.cell(p, i).id));
        }
        out.push(SignedPermutation::new(target, sign).map_err(|e| format!("degree {p}: {e}"))?);
    }
    Ok(Generator { name: name.into(), maps: out })
}

// cover files

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoverFile {
    name: Option<String>,
    rank: usize,
    cells: Vec<Vec<usize>>,
    lifts: Vec<LiftFile>,
    #[serde(default)]
    collar: Vec<usize>,
    #[serde(default)]
    contractible: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LiftFile {
    coface: usize,
    face: usize,
    offset: Vec<i64>,
    coeff: i64,
}

pub fn load_cover(base: &Path, reference: &str) -> Result<PeriodicCover, CliError> {
    if !is_path(reference) {
        return catalog::cover(reference).ok_or_else(|| CliError::Input(format!("unknown cover `{reference}`")));
    }
    let path = resolve(base, reference);
    let f: CoverFile = parse(&path, &read(&path)?)?;
    let cells = f
        .cells
        .iter()
        .enumerate()
        .flat_map(|(p, ids)| ids.iter().map(move |&id| Cell { id, degree: p, shape: CellShape::Abstract }))
        .collect();
    let lifts = f.lifts.into_iter().map(|l| LiftEntry { coface: l.coface, face: l.face, offset: l.offset, coeff: l.coeff }).collect();
    let name = f.name.unwrap_or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
    let collar: BTreeSet<usize> = f.collar.into_iter().collect();
    Ok(PeriodicCover::new(name, f.rank, cells, lifts, collar, f.contractible, CoverFamily::Custom)?)
}

// weight files

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightsFile {
    #[serde(default)]
    weights: BTreeMap<String, toml::Value>,
}

/// Diagonal pairing keyed by cell id; unlisted cells weigh one.
pub fn load_weights(base: &Path, reference: &str, k: &CellComplex) -> Result<InnerProduct, CliError> {
    let path = resolve(base, reference);
    let f: WeightsFile = parse(&path, &read(&path)?)?;
    let file = path.display().to_string();
    let bad = |message: String| CliError::Parse { file: file.clone(), message };
    let mut given: HashMap<usize, Rational> = HashMap::new();
    for (key, value) in &f.weights {
        let id: usize = key.parse().map_err(|_| bad(format!("weights.{key}: keys are cell ids")))?;
        k.locate(id).ok_or_else(|| bad(format!("weights.{key}: no such cell")))?;
        let w = match value {
            toml::Value::Integer(i) => Rational::from_integer((*i).into()),
            toml::Value::String(s) => parse_rational(s).ok_or_else(|| bad(format!("weights.{key}: `{s}` is not a rational")))?,
            _ => return Err(bad(format!("weights.{key}: expected an integer or a string like \"3/2\""))),
        };
        given.insert(id, w);
    }
    let weights = (0..=k.dim())
        .map(|p| k.cells(p).iter().map(|c| given.get(&c.id).cloned().unwrap_or_else(|| Rational::from_integer(1.into()))).collect())
        .collect();
    Ok(InnerProduct::diagonal(k, weights)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations_parse() {
        let names = vec!["a".to_string(), "b".to_string()];
        let r = parse_relation("a^2 * b * a^-1", &names).unwrap();
        assert_eq!(r.factors, vec![(0, 2), (1, 1), (0, -1)]);
        assert!(parse_relation("c", &names).is_err());
        assert!(parse_relation("a^x", &names).is_err());
    }

    #[test]
    fn bundled_names_resolve() {
        for name in bundled_scenario_names() {
            assert!(bundled_scenario(&name).is_some(), "{name}");
        }
        assert!(bundled_scenario("nothing").is_none());
    }
}
