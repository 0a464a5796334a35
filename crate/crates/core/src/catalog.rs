//! Finite curve catalogs: mapping-class orbits of simple seed curves with
//! cached lengths, homology and pairwise intersection data.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canonical::{canonical_class, homology_class, CurveClass};
use crate::error::{Error, Result};
use crate::holonomy::{holonomy_from_fn, FNCoordinates, Holonomy};
use crate::intersection::{self, EngineConfig};
use crate::mapping::{apply_to_word, humphries_curve, MappingClassWord};
use crate::marking::handle_boundary_word;
use crate::word::{Genus, GroupWord};

/// Enumeration budgets.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EnumerationParams {
    pub depth: usize,
    pub entry_cap: usize,
    pub engine: EngineConfig,
}

impl Default for EnumerationParams {
    fn default() -> Self {
        EnumerationParams {
            depth: 2,
            entry_cap: 5000,
            engine: EngineConfig::default(),
        }
    }
}

/// What is known about one unordered pair of catalog entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairVerdict {
    /// Certified disjoint.
    Disjoint,
    /// At least one crossing was found; `certified` marks whether `count`
    /// is the full intersection number.
    Intersecting { count: u64, certified: bool },
    /// The enumeration caps were reached before any verdict.
    Unknown,
}

impl PairVerdict {
    pub fn disjointness(&self) -> Option<bool> {
        match self {
            PairVerdict::Disjoint => Some(true),
            PairVerdict::Intersecting { .. } => Some(false),
            PairVerdict::Unknown => None,
        }
    }
}

/// One catalog entry.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub id: usize,
    pub word: GroupWord,
    pub length: f64,
    pub homology: Vec<i64>,
    pub separating: bool,
}

/// Serializable catalog image; the holonomy is rebuilt from the coordinates.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CatalogFile {
    pub genus: Genus,
    #[serde(rename = "fn")]
    pub fn_data: crate::holonomy::FNData,
    pub depth: usize,
    pub seeds: Vec<GroupWord>,
    pub entries: Vec<CatalogEntry>,
    /// (u, v, count, certified): count 0 with certified true is certified
    /// disjointness; count > 0 with certified false is a crossing found
    /// before the full count was certified.
    pub intersections: Vec<(usize, usize, u64, bool)>,
    pub stability_horizon: f64,
}

/// The finite stage for graphs and experiments.
pub struct Catalog {
    genus: Genus,
    surface: FNCoordinates,
    depth: usize,
    seeds: Vec<GroupWord>,
    entries: Vec<CatalogEntry>,
    classes: Vec<CurveClass>,
    by_word: HashMap<GroupWord, usize>,
    stability_horizon: f64,
    engine: EngineConfig,
    holonomy: Arc<Holonomy<f64>>,
    pairs: RwLock<HashMap<(usize, usize), PairVerdict>>,
}

/// Default seeds: the chain curves plus the handle-boundary commutator
/// classes, so both separating and non-separating entries exist at depth 0.
pub fn default_seeds(genus: Genus) -> Vec<GroupWord> {
    let mut seeds = Vec::new();
    for j in 1..=genus.chain_count() {
        seeds.push(crate::marking::chain_curve_word(genus, j).expect("chain word"));
    }
    for i in 1..=genus.get() as usize {
        seeds.push(handle_boundary_word(genus, i));
    }
    seeds
}

fn fingerprint_check(
    h: &Holonomy<f64>,
    raw_word: &GroupWord,
    class: &CurveClass,
) -> Result<()> {
    let genus = class.genus();
    if homology_class(raw_word, genus) != class.homology() {
        return Err(Error::FingerprintMismatch(format!(
            "homology of {raw_word:?} disagrees with its canonical form"
        )));
    }
    let t_raw = h.evaluate(raw_word)?.trace().abs();
    let t_canon = h.evaluate(class.word())?.trace().abs();
    if (t_raw - t_canon).abs() > 1e-6 * t_canon.max(1.0) {
        return Err(Error::FingerprintMismatch(format!(
            "trace tag of {raw_word:?} disagrees with its canonical form: {t_raw} vs {t_canon}"
        )));
    }
    Ok(())
}

/// Enumerate the orbit of the seeds under twist generators up to the given
/// word-length depth, with all caches filled.
pub fn enumerate_curves(
    fnc: &FNCoordinates,
    params: &EnumerationParams,
    seeds: &[GroupWord],
) -> Result<Catalog> {
    let genus = fnc.genus;
    let holonomy = Arc::new(holonomy_from_fn::<f64>(fnc)?);

    // seed classes must be certified simple by the engine
    let mut classes: Vec<CurveClass> = Vec::new();
    let mut seen: HashMap<GroupWord, ()> = HashMap::new();
    for s in seeds {
        let c = canonical_class(s, genus)?;
        fingerprint_check(&holonomy, s, &c)?;
        if !intersection::is_simple(&holonomy, &c, &params.engine)? {
            return Err(Error::InvalidInput(format!(
                "seed {s:?} is not a simple curve"
            )));
        }
        if seen.insert(c.word().clone(), ()).is_none() {
            classes.push(c);
        }
    }

    // breadth-first orbit closure; images of simple curves stay simple
    let gens: Vec<i32> = (1..=genus.chain_count() as i32)
        .flat_map(|j| [j, -j])
        .collect();
    let mut frontier: Vec<CurveClass> = classes.clone();
    for _ in 0..params.depth {
        let mut next: Vec<CurveClass> = Vec::new();
        for c in &frontier {
            for &t in &gens {
                let raw = apply_to_word(genus, &MappingClassWord::single(t), c.word())?;
                let img = canonical_class(&raw, genus)?;
                fingerprint_check(&holonomy, &raw, &img)?;
                if seen.insert(img.word().clone(), ()).is_none() {
                    if classes.len() + next.len() + 1 > params.entry_cap {
                        return Err(Error::BudgetExceeded(params.entry_cap));
                    }
                    next.push(img);
                }
            }
        }
        classes.extend(next.iter().cloned());
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }

    // deterministic ids: sort by word length, then letters
    classes.sort_by(|a, b| {
        (a.word().len(), a.word().letters()).cmp(&(b.word().len(), b.word().letters()))
    });
    let mut entries = Vec::with_capacity(classes.len());
    let mut by_word = HashMap::new();
    for (id, c) in classes.iter().enumerate() {
        let length = holonomy.length(c)?;
        entries.push(CatalogEntry {
            id,
            word: c.word().clone(),
            length,
            homology: c.homology().to_vec(),
            separating: c.is_null_homologous(),
        });
        by_word.insert(c.word().clone(), id);
    }

    // stability horizon: smallest entry length whose some twist image
    // escapes the window; the catalog is complete below it
    let mut horizon = f64::INFINITY;
    for c in &classes {
        let l = holonomy.length(c)?;
        if l >= horizon {
            continue;
        }
        for &t in &gens {
            let img = crate::mapping::apply(genus, &MappingClassWord::single(t), c)?;
            if !by_word.contains_key(img.word()) {
                horizon = horizon.min(l);
                break;
            }
        }
    }

    Ok(Catalog {
        genus,
        surface: fnc.clone(),
        depth: params.depth,
        seeds: seeds.to_vec(),
        entries,
        classes,
        by_word,
        stability_horizon: horizon,
        engine: params.engine,
        holonomy,
        pairs: RwLock::new(HashMap::new()),
    })
}

impl Catalog {
    pub fn genus(&self) -> Genus {
        self.genus
    }

    pub fn surface(&self) -> &FNCoordinates {
        &self.surface
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn class(&self, id: usize) -> &CurveClass {
        &self.classes[id]
    }

    pub fn length(&self, id: usize) -> f64 {
        self.entries[id].length
    }

    pub fn separating(&self, id: usize) -> bool {
        self.entries[id].separating
    }

    pub fn id_of(&self, class: &CurveClass) -> Option<usize> {
        self.by_word.get(class.word()).copied()
    }

    pub fn holonomy(&self) -> &Arc<Holonomy<f64>> {
        &self.holonomy
    }

    pub fn engine_config(&self) -> &EngineConfig {
        &self.engine
    }

    pub fn stability_horizon(&self) -> f64 {
        self.stability_horizon
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// ids of entries with length <= r, sorted by length then id.
    pub fn sublevel_set(&self, r: f64) -> Vec<usize> {
        let mut ids: Vec<usize> = self
            .entries
            .iter()
            .filter(|e| e.length <= r)
            .map(|e| e.id)
            .collect();
        ids.sort_by(|&a, &b| {
            self.entries[a]
                .length
                .partial_cmp(&self.entries[b].length)
                .unwrap()
                .then(a.cmp(&b))
        });
        ids
    }

    fn key(u: usize, v: usize) -> (usize, usize) {
        (u.min(v), u.max(v))
    }

    /// Disjointness verdict for a pair, memoized; runs the fast enumeration
    /// on a miss.
    pub fn pair_verdict(&self, u: usize, v: usize) -> Result<PairVerdict> {
        if u == v {
            return Ok(PairVerdict::Disjoint);
        }
        let key = Self::key(u, v);
        if let Some(p) = self.pairs.read().unwrap().get(&key) {
            return Ok(*p);
        }
        let verdict = self.compute_verdict(key.0, key.1)?;
        self.pairs.write().unwrap().insert(key, verdict);
        Ok(verdict)
    }

    fn compute_verdict(&self, u: usize, v: usize) -> Result<PairVerdict> {
        match intersection::certified_disjoint(
            &self.holonomy,
            &self.classes[u],
            &self.classes[v],
            &self.engine,
        ) {
            Ok(Some(true)) => Ok(PairVerdict::Disjoint),
            Ok(Some(false)) => Ok(PairVerdict::Intersecting {
                count: 1,
                certified: false,
            }),
            Ok(None) => Ok(PairVerdict::Unknown),
            Err(Error::TangencyAmbiguity) => Ok(PairVerdict::Unknown),
            Err(e) => Err(e),
        }
    }

    /// Full intersection number for a pair; upgrades the memoized verdict.
    pub fn intersection_count(&self, u: usize, v: usize) -> Result<intersection::IntersectionResult> {
        let r = intersection::geometric_intersection(
            &self.holonomy,
            &self.classes[u],
            &self.classes[v],
            &self.engine,
        )?;
        if u != v {
            let verdict = if r.certified && r.count == 0 {
                PairVerdict::Disjoint
            } else if r.count > 0 {
                PairVerdict::Intersecting {
                    count: r.count,
                    certified: r.certified,
                }
            } else {
                PairVerdict::Unknown
            };
            self.pairs.write().unwrap().insert(Self::key(u, v), verdict);
        }
        Ok(r)
    }

    /// Compute every pairwise verdict in parallel.
    pub fn fill_all_pairs(&self) -> Result<()> {
        let n = self.len();
        let todo: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
            .filter(|k| !self.pairs.read().unwrap().contains_key(k))
            .collect();
        let computed: Vec<((usize, usize), Result<PairVerdict>)> = todo
            .par_iter()
            .map(|&(u, v)| ((u, v), self.compute_verdict(u, v)))
            .collect();
        let mut map = self.pairs.write().unwrap();
        for (k, r) in computed {
            map.insert(k, r?);
        }
        Ok(())
    }

    /// Serializable image with the memoized pair data, sorted for
    /// deterministic output.
    pub fn to_file(&self) -> CatalogFile {
        let mut intersections: Vec<(usize, usize, u64, bool)> = self
            .pairs
            .read()
            .unwrap()
            .iter()
            .map(|(&(u, v), p)| match p {
                PairVerdict::Disjoint => (u, v, 0, true),
                PairVerdict::Intersecting { count, certified } => (u, v, *count, *certified),
                PairVerdict::Unknown => (u, v, 0, false),
            })
            .collect();
        intersections.sort_unstable();
        CatalogFile {
            genus: self.genus,
            fn_data: self.surface.data.clone(),
            depth: self.depth,
            seeds: self.seeds.clone(),
            entries: self.entries.clone(),
            intersections,
            stability_horizon: self.stability_horizon,
        }
    }

    /// Rebuild a catalog from its file image, reconstructing the holonomy
    /// deterministically and re-validating entry canonicality.
    pub fn from_file(file: CatalogFile, engine: EngineConfig) -> Result<Catalog> {
        let fnc = FNCoordinates {
            genus: file.genus,
            data: file.fn_data.clone(),
        };
        let holonomy = Arc::new(holonomy_from_fn::<f64>(&fnc)?);
        let mut classes = Vec::with_capacity(file.entries.len());
        let mut by_word = HashMap::new();
        for (i, e) in file.entries.iter().enumerate() {
            if e.id != i {
                return Err(Error::InvalidInput("catalog ids must be dense".into()));
            }
            let c = canonical_class(&e.word, file.genus)?;
            if c.word() != &e.word {
                return Err(Error::InvalidInput(format!(
                    "entry {i} is not in canonical form"
                )));
            }
            by_word.insert(e.word.clone(), i);
            classes.push(c);
        }
        let mut pairs = HashMap::new();
        for &(u, v, count, certified) in &file.intersections {
            if u >= classes.len() || v >= classes.len() {
                return Err(Error::InvalidInput("intersection pair out of range".into()));
            }
            let verdict = if count == 0 && certified {
                PairVerdict::Disjoint
            } else if count > 0 {
                PairVerdict::Intersecting { count, certified }
            } else {
                PairVerdict::Unknown
            };
            pairs.insert((u.min(v), u.max(v)), verdict);
        }
        Ok(Catalog {
            genus: file.genus,
            surface: fnc,
            depth: file.depth,
            seeds: file.seeds,
            entries: file.entries,
            classes,
            by_word,
            stability_horizon: file.stability_horizon,
            engine,
            holonomy,
            pairs: RwLock::new(pairs),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holonomy::reference_fn;
    use crate::word::Genus;

    fn g2() -> Genus {
        Genus::new(2).unwrap()
    }

    fn quick_params(depth: usize) -> EnumerationParams {
        EnumerationParams {
            depth,
            entry_cap: 5000,
            engine: EngineConfig::default(),
        }
    }

    #[test]
    fn depth_zero_humphries_seeds_give_five_entries() {
        let fnc = reference_fn(g2());
        let seeds: Vec<GroupWord> = (1..=5)
            .map(|j| crate::marking::chain_curve_word(g2(), j).unwrap())
            .collect();
        let cat = enumerate_curves(&fnc, &quick_params(0), &seeds).unwrap();
        assert_eq!(cat.len(), 5);
        assert!(cat.entries().iter().all(|e| !e.separating));
    }

    #[test]
    fn default_seeds_include_one_separating_class_in_genus_two() {
        // both handle boundaries of genus 2 are the same separating class
        let fnc = reference_fn(g2());
        let cat = enumerate_curves(&fnc, &quick_params(0), &default_seeds(g2())).unwrap();
        assert_eq!(cat.len(), 6);
        assert_eq!(cat.entries().iter().filter(|e| e.separating).count(), 1);
    }

    #[test]
    fn entry_count_grows_with_depth_and_is_deterministic() {
        let fnc = reference_fn(g2());
        let seeds = default_seeds(g2());
        let c0 = enumerate_curves(&fnc, &quick_params(0), &seeds).unwrap();
        let c1 = enumerate_curves(&fnc, &quick_params(1), &seeds).unwrap();
        assert!(c1.len() > c0.len());
        let c1b = enumerate_curves(&fnc, &quick_params(1), &seeds).unwrap();
        let a = serde_json::to_string(&c1.to_file()).unwrap();
        let b = serde_json::to_string(&c1b.to_file()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sublevel_sets_are_sorted_and_nested() {
        let fnc = reference_fn(g2());
        let cat = enumerate_curves(&fnc, &quick_params(1), &default_seeds(g2())).unwrap();
        let all = cat.sublevel_set(f64::INFINITY);
        assert_eq!(all.len(), cat.len());
        let small = cat.sublevel_set(3.0);
        for w in small.windows(2) {
            assert!(cat.length(w[0]) <= cat.length(w[1]));
        }
        let tiny = cat.sublevel_set(0.1);
        assert!(tiny.is_empty());
    }

    #[test]
    fn pair_verdicts_match_direct_intersection() {
        let fnc = reference_fn(g2());
        let cat = enumerate_curves(&fnc, &quick_params(0), &default_seeds(g2())).unwrap();
        for u in 0..cat.len() {
            for v in (u + 1)..cat.len() {
                let verdict = cat.pair_verdict(u, v).unwrap();
                let full = cat.intersection_count(u, v).unwrap();
                assert!(full.certified);
                match verdict {
                    PairVerdict::Disjoint => assert_eq!(full.count, 0),
                    PairVerdict::Intersecting { .. } => assert!(full.count > 0),
                    PairVerdict::Unknown => panic!("depth-0 pair should be decidable"),
                }
            }
        }
    }

    #[test]
    fn file_round_trip_preserves_catalog() {
        let fnc = reference_fn(g2());
        let cat = enumerate_curves(&fnc, &quick_params(1), &default_seeds(g2())).unwrap();
        cat.pair_verdict(0, 1).unwrap();
        let file = cat.to_file();
        let json = serde_json::to_string(&file).unwrap();
        let parsed: CatalogFile = serde_json::from_str(&json).unwrap();
        let back = Catalog::from_file(parsed, EngineConfig::default()).unwrap();
        assert_eq!(back.len(), cat.len());
        assert_eq!(
            serde_json::to_string(&back.to_file()).unwrap(),
            serde_json::to_string(&cat.to_file()).unwrap()
        );
    }

    #[test]
    fn stability_horizon_is_finite_and_positive() {
        let fnc = reference_fn(g2());
        let cat = enumerate_curves(&fnc, &quick_params(1), &default_seeds(g2())).unwrap();
        assert!(cat.stability_horizon().is_finite());
        assert!(cat.stability_horizon() > 0.0);
        // every generator image of an entry strictly below the horizon is
        // itself an entry
        let gens: Vec<i32> = (1..=5).flat_map(|j| [j, -j]).collect();
        for e in cat.entries() {
            if e.length < cat.stability_horizon() {
                for &t in &gens {
                    let img = crate::mapping::apply(
                        g2(),
                        &MappingClassWord::single(t),
                        cat.class(e.id),
                    )
                    .unwrap();
                    assert!(cat.id_of(&img).is_some());
                }
            }
        }
    }
}
