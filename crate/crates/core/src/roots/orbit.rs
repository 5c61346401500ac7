use std::collections::VecDeque;

use rustc_hash::FxHashMap;

use super::{RootError, RootSystem, RootVector};

/// Something that maps lattice vectors to lattice vectors.
pub trait VectorAction {
    fn act(&self, v: &RootVector) -> Result<RootVector, RootError>;
}

/// A set of vectors split into orbits.
///
/// Orbits are numbered by their smallest member index, and each orbit's
/// member list is sorted, so `orbits[i][0]` is the canonical representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitPartition {
    pub orbit_of: Vec<u32>,
    pub orbits: Vec<Vec<u32>>,
}

impl OrbitPartition {
    pub fn trivial(n: usize) -> Self {
        Self {
            orbit_of: (0..n as u32).collect(),
            orbits: (0..n as u32).map(|i| vec![i]).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    pub fn representatives(&self) -> impl Iterator<Item = u32> + '_ {
        self.orbits.iter().map(|o| o[0])
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.orbits.iter().map(Vec::len).collect()
    }

    fn from_labels(labels: Vec<u32>) -> Self {
        // Relabel so orbit ids follow first occurrence in index order.
        let mut remap = FxHashMap::default();
        let mut orbits: Vec<Vec<u32>> = Vec::new();
        let orbit_of = labels
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                let id = *remap.entry(l).or_insert_with(|| {
                    orbits.push(Vec::new());
                    (orbits.len() - 1) as u32
                });
                orbits[id as usize].push(i as u32);
                id
            })
            .collect();
        Self { orbit_of, orbits }
    }
}

/// Orbits of a finite set that is closed under the given generators.
///
/// Fails with [`RootError::NotClosed`] if a generator maps a member outside the set.
pub fn orbits_of_set<A: VectorAction>(
    vectors: &[RootVector],
    generators: &[A],
) -> Result<OrbitPartition, RootError> {
    let index: FxHashMap<u64, u32> = vectors
        .iter()
        .enumerate()
        .map(|(i, v)| (v.key(), i as u32))
        .collect();
    let mut label = vec![u32::MAX; vectors.len()];
    let mut queue = VecDeque::new();
    for start in 0..vectors.len() {
        if label[start] != u32::MAX {
            continue;
        }
        label[start] = start as u32;
        queue.push_back(start as u32);
        while let Some(cur) = queue.pop_front() {
            for g in generators {
                let image = g.act(&vectors[cur as usize])?;
                let &j = index
                    .get(&image.key())
                    .ok_or(RootError::NotClosed(vectors[cur as usize]))?;
                if label[j as usize] == u32::MAX {
                    label[j as usize] = start as u32;
                    queue.push_back(j);
                }
            }
        }
    }
    Ok(OrbitPartition::from_labels(label))
}

/// Closes `seeds` under the simple reflections of `rs` and splits the
/// closure into Weyl orbits. Returns the closure (sorted) with its partition.
pub fn orbit_closure(
    rs: &RootSystem,
    seeds: &[RootVector],
) -> Result<(Vec<RootVector>, OrbitPartition), RootError> {
    let dim = rs.ambient_dim();
    if let Some(bad) = seeds.iter().find(|s| s.dim() != dim) {
        return Err(RootError::DimensionMismatch {
            left: bad.dim(),
            right: dim,
        });
    }
    let reflections = rs.simple_reflections();
    let mut seen: FxHashMap<u64, ()> = FxHashMap::default();
    let mut closure = Vec::new();
    let mut queue: VecDeque<RootVector> = VecDeque::new();
    for s in seeds {
        if seen.insert(s.key(), ()).is_none() {
            closure.push(*s);
            queue.push_back(*s);
        }
    }
    while let Some(cur) = queue.pop_front() {
        for r in &reflections {
            let image = r.apply(&cur)?;
            if seen.insert(image.key(), ()).is_none() {
                closure.push(image);
                queue.push_back(image);
            }
        }
    }
    closure.sort_unstable();
    let partition = orbits_of_set(&closure, &reflections)?;
    Ok((closure, partition))
}
