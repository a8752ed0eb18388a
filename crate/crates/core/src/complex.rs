//! Finite abstract simplicial complexes, subcomplexes and barycentric subdivision.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::name::VertexName;

/// Largest simplex (number of vertices) accepted on input; face closure is exponential.
pub const MAX_SIMPLEX_SIZE: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("empty simplex in input")]
    EmptySimplex,
    #[error("vertex {vertex} repeated inside simplex {simplex:?}")]
    DuplicateVertex { vertex: VertexName, simplex: Vec<VertexName> },
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexName),
    #[error("vertex {0} listed twice")]
    DuplicateListedVertex(VertexName),
    #[error("simplex with {0} vertices exceeds the supported size")]
    TooLarge(usize),
    #[error("{0}")]
    NotSubdivision(String),
}

/// A simplex stored as sorted vertex indices into its complex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    pub fn new(mut vertices: Vec<usize>) -> Self {
        vertices.sort_unstable();
        vertices.dedup();
        Simplex(vertices)
    }

    pub fn vertex(v: usize) -> Self {
        Simplex(vec![v])
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.0.iter().all(|v| other.contains_vertex(*v))
    }

    pub fn meets(&self, vertices: &BTreeSet<usize>) -> bool {
        self.0.iter().any(|v| vertices.contains(v))
    }

    pub fn union(&self, other: &Simplex) -> Simplex {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Simplex::new(v)
    }

    /// All non-empty faces, including the simplex itself.
    pub fn faces(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = self.0.len();
        (1u64..(1u64 << n)).map(move |mask| {
            Simplex((0..n).filter(|i| mask >> i & 1 == 1).map(|i| self.0[i]).collect())
        })
    }

    /// Codimension-one faces, in the order obtained by deleting vertex 0, 1, ...
    pub fn facets(&self) -> Vec<Simplex> {
        if self.0.len() <= 1 {
            return Vec::new();
        }
        (0..self.0.len())
            .map(|i| {
                let mut v = self.0.clone();
                v.remove(i);
                Simplex(v)
            })
            .collect()
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// A finite simplicial complex, closed under taking faces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    names: Vec<VertexName>,
    index: BTreeMap<VertexName, usize>,
    simplices: BTreeSet<Simplex>,
    by_dim: Vec<Vec<Simplex>>,
    maximal: Vec<Simplex>,
}

impl Complex {
    /// The complex generated by the given simplices; vertices are the ones used.
    pub fn from_maximal<S: AsRef<[VertexName]>>(maximal: &[S]) -> Result<Complex, ComplexError> {
        Self::build(None, maximal)
    }

    /// Like [`Complex::from_maximal`], with an explicit vertex list that may add isolated
    /// vertices and must mention every vertex used by a simplex.
    pub fn with_vertices<S: AsRef<[VertexName]>>(
        vertices: &[VertexName],
        maximal: &[S],
    ) -> Result<Complex, ComplexError> {
        Self::build(Some(vertices), maximal)
    }

    fn build<S: AsRef<[VertexName]>>(
        vertices: Option<&[VertexName]>,
        maximal: &[S],
    ) -> Result<Complex, ComplexError> {
        let mut names: BTreeSet<VertexName> = BTreeSet::new();
        if let Some(vs) = vertices {
            for v in vs {
                if !names.insert(v.clone()) {
                    return Err(ComplexError::DuplicateListedVertex(v.clone()));
                }
            }
        }
        for s in maximal {
            let s = s.as_ref();
            if s.is_empty() {
                return Err(ComplexError::EmptySimplex);
            }
            if s.len() > MAX_SIMPLEX_SIZE {
                return Err(ComplexError::TooLarge(s.len()));
            }
            let mut seen = BTreeSet::new();
            for v in s {
                if !seen.insert(v) {
                    return Err(ComplexError::DuplicateVertex { vertex: v.clone(), simplex: s.to_vec() });
                }
                if vertices.is_some() && !names.contains(v) {
                    return Err(ComplexError::UnknownVertex(v.clone()));
                }
            }
            if vertices.is_none() {
                names.extend(s.iter().cloned());
            }
        }
        let names: Vec<VertexName> = names.into_iter().collect();
        let index: BTreeMap<VertexName, usize> =
            names.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
        let gens = maximal
            .iter()
            .map(|s| Simplex::new(s.as_ref().iter().map(|v| index[v]).collect()))
            .collect::<Vec<_>>();
        Ok(Self::from_parts(names, gens))
    }

    /// Builds a complex from sorted, distinct names and generating simplices over them.
    /// Every name becomes a vertex, even if no generator uses it.
    pub(crate) fn from_parts<I: IntoIterator<Item = Simplex>>(names: Vec<VertexName>, generators: I) -> Complex {
        debug_assert!(names.windows(2).all(|w| w[0] < w[1]));
        let mut simplices: BTreeSet<Simplex> = (0..names.len()).map(Simplex::vertex).collect();
        for g in generators {
            if simplices.contains(&g) {
                continue;
            }
            simplices.extend(g.faces());
        }
        let index = names.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
        let top = simplices.iter().map(Simplex::len).max().unwrap_or(0);
        let mut by_dim = vec![Vec::new(); top];
        for s in &simplices {
            by_dim[s.len() - 1].push(s.clone());
        }
        let mut maximal = Vec::new();
        for (d, layer) in by_dim.iter().enumerate() {
            let covered: BTreeSet<Simplex> = by_dim
                .get(d + 1)
                .map(|up| up.iter().flat_map(|s| s.facets()).collect())
                .unwrap_or_default();
            maximal.extend(layer.iter().filter(|s| !covered.contains(*s)).cloned());
        }
        maximal.sort();
        Complex { names, index, simplices, by_dim, maximal }
    }

    /// Builds a complex from arbitrary (unsorted) names and index-based generators.
    /// Also returns, for every input position, the index of that vertex in the result.
    pub fn from_named_parts(names: Vec<VertexName>, generators: Vec<Vec<usize>>) -> (Complex, Vec<usize>) {
        let mut order: Vec<usize> = (0..names.len()).collect();
        order.sort_by(|a, b| names[*a].cmp(&names[*b]));
        let mut remap = vec![0; names.len()];
        for (new, old) in order.iter().enumerate() {
            remap[*old] = new;
        }
        let sorted: Vec<VertexName> = order.iter().map(|i| names[*i].clone()).collect();
        let gens = generators
            .into_iter()
            .map(|g| Simplex::new(g.into_iter().map(|v| remap[v]).collect()))
            .collect::<Vec<_>>();
        (Self::from_parts(sorted, gens), remap)
    }

    pub fn empty() -> Complex {
        Self::from_parts(Vec::new(), Vec::new())
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[VertexName] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &VertexName {
        &self.names[v]
    }

    pub fn index_of(&self, name: &VertexName) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn vertex(&self, name: &VertexName) -> Result<usize, ComplexError> {
        self.index_of(name).ok_or_else(|| ComplexError::UnknownVertex(name.clone()))
    }

    /// Dimension, `-1` for the empty complex.
    pub fn dim(&self) -> isize {
        self.by_dim.len() as isize - 1
    }

    pub fn simplex_count(&self) -> usize {
        self.simplices.len()
    }

    pub fn simplices(&self) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter()
    }

    pub fn simplices_of_dim(&self, k: usize) -> &[Simplex] {
        self.by_dim.get(k).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn maximal(&self) -> &[Simplex] {
        &self.maximal
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.simplices.contains(s)
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.by_dim.iter().map(Vec::len).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.by_dim
            .iter()
            .enumerate()
            .map(|(d, l)| if d % 2 == 0 { l.len() as i64 } else { -(l.len() as i64) })
            .sum()
    }

    pub fn simplex_names(&self, s: &Simplex) -> Vec<VertexName> {
        s.vertices().iter().map(|v| self.names[*v].clone()).collect()
    }

    pub fn simplex(&self, names: &[VertexName]) -> Result<Simplex, ComplexError> {
        let s = Simplex::new(names.iter().map(|n| self.vertex(n)).collect::<Result<_, _>>()?);
        Ok(s)
    }

    pub fn maximal_names(&self) -> Vec<Vec<VertexName>> {
        self.maximal.iter().map(|s| self.simplex_names(s)).collect()
    }

    /// Subcomplex of all simplices whose vertices lie in `w`.
    pub fn induced(&self, w: &BTreeSet<usize>) -> Subcomplex {
        Subcomplex {
            simplices: self
                .simplices
                .iter()
                .filter(|s| s.vertices().iter().all(|v| w.contains(v)))
                .cloned()
                .collect(),
        }
    }

    pub fn induced_subcomplex(&self, w: &[VertexName]) -> Result<Subcomplex, ComplexError> {
        let set = w.iter().map(|n| self.vertex(n)).collect::<Result<BTreeSet<_>, _>>()?;
        Ok(self.induced(&set))
    }

    pub fn whole(&self) -> Subcomplex {
        Subcomplex { simplices: self.simplices.clone() }
    }

    /// Neighbours of a vertex in the 1-skeleton, ascending.
    pub fn neighbours(&self, v: usize) -> Vec<usize> {
        self.simplices_of_dim(1)
            .iter()
            .filter_map(|e| match e.vertices() {
                [a, b] if *a == v => Some(*b),
                [a, b] if *b == v => Some(*a),
                _ => None,
            })
            .collect()
    }

    pub fn barycentric_subdivision(&self) -> Complex {
        Subdivision::of(self).fine
    }
}

/// `A` is full in `L` when every simplex of `L` spanned by vertices of `A` belongs to `A`.
pub fn is_full_subcomplex(a: &Subcomplex, l: &Complex) -> bool {
    let verts = a.vertices();
    l.simplices()
        .filter(|s| s.vertices().iter().all(|v| verts.contains(v)))
        .all(|s| a.contains(s))
}

/// A face-closed set of simplices of some parent complex.
#[derive(Clone, Debug, PartialEq, Eq, Default, Hash, PartialOrd, Ord)]
pub struct Subcomplex {
    simplices: BTreeSet<Simplex>,
}

impl Subcomplex {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Face closure of the given simplices.
    pub fn generated_by<I: IntoIterator<Item = Simplex>>(gens: I) -> Self {
        let mut simplices = BTreeSet::new();
        for g in gens {
            if !simplices.contains(&g) {
                simplices.extend(g.faces());
            }
        }
        Subcomplex { simplices }
    }

    pub fn from_names(parent: &Complex, gens: &[Vec<VertexName>]) -> Result<Self, ComplexError> {
        let gens = gens.iter().map(|g| parent.simplex(g)).collect::<Result<Vec<_>, _>>()?;
        for g in &gens {
            if !parent.contains(g) {
                return Err(ComplexError::NotSubdivision(format!(
                    "simplex {:?} is not in the parent complex",
                    parent.simplex_names(g)
                )));
            }
        }
        Ok(Self::generated_by(gens))
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.simplices.contains(s)
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn simplices(&self) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter()
    }

    pub fn vertices(&self) -> BTreeSet<usize> {
        self.simplices.iter().filter(|s| s.len() == 1).map(|s| s.vertices()[0]).collect()
    }

    pub fn maximal(&self) -> Vec<Simplex> {
        let covered: BTreeSet<Simplex> = self.simplices.iter().filter(|s| s.len() > 1).flat_map(|s| s.facets()).collect();
        self.simplices.iter().filter(|s| !covered.contains(*s)).cloned().collect()
    }

    pub fn f_vector(&self) -> Vec<usize> {
        let top = self.simplices.iter().map(Simplex::len).max().unwrap_or(0);
        let mut f = vec![0; top];
        for s in &self.simplices {
            f[s.len() - 1] += 1;
        }
        f
    }

    pub fn intersection(&self, other: &Subcomplex) -> Subcomplex {
        Subcomplex { simplices: self.simplices.intersection(&other.simplices).cloned().collect() }
    }

    pub fn union(&self, other: &Subcomplex) -> Subcomplex {
        Subcomplex { simplices: self.simplices.union(&other.simplices).cloned().collect() }
    }

    pub fn is_subcomplex_of(&self, parent: &Complex) -> bool {
        self.simplices.iter().all(|s| parent.contains(s) && s.facets().iter().all(|f| self.contains(f)))
    }

    /// Standalone complex on the vertices this subcomplex uses, with the parent's names.
    pub fn to_complex(&self, parent: &Complex) -> Complex {
        let verts: Vec<usize> = self.vertices().into_iter().collect();
        let local: BTreeMap<usize, usize> = verts.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let names = verts.iter().map(|v| parent.name(*v).clone()).collect();
        let gens = self
            .maximal()
            .into_iter()
            .map(|s| Simplex(s.vertices().iter().map(|v| local[v]).collect()));
        Complex::from_parts(names, gens)
    }

    pub fn names(&self, parent: &Complex) -> Vec<Vec<VertexName>> {
        self.maximal().iter().map(|s| parent.simplex_names(s)).collect()
    }
}

/// A complex together with its barycentric subdivision and, for every vertex of the
/// subdivision, the simplex of the parent whose barycenter it is.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subdivision {
    pub parent: Complex,
    pub fine: Complex,
    carriers: Vec<Simplex>,
    vertex_of: BTreeMap<Simplex, usize>,
}

impl Subdivision {
    pub fn of(parent: &Complex) -> Subdivision {
        let parent_simplices: Vec<Simplex> = parent.simplices().cloned().collect();
        let names: Vec<VertexName> = parent_simplices
            .iter()
            .map(|s| VertexName::set(parent.simplex_names(s)))
            .collect();
        let mut order: Vec<usize> = (0..names.len()).collect();
        order.sort_by(|a, b| names[*a].cmp(&names[*b]));
        let mut fine_index = vec![0; names.len()];
        for (new, old) in order.iter().enumerate() {
            fine_index[*old] = new;
        }
        let vertex_of: BTreeMap<Simplex, usize> = parent_simplices
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), fine_index[i]))
            .collect();
        let carriers: Vec<Simplex> = order.iter().map(|i| parent_simplices[*i].clone()).collect();
        let sorted_names: Vec<VertexName> = order.iter().map(|i| names[*i].clone()).collect();

        // Maximal chains are the flags of maximal simplices.
        let mut gens = Vec::new();
        for m in parent.maximal() {
            for perm in permutations(m.vertices()) {
                let mut chain = Vec::with_capacity(perm.len());
                for k in 1..=perm.len() {
                    chain.push(vertex_of[&Simplex::new(perm[..k].to_vec())]);
                }
                gens.push(Simplex::new(chain));
            }
        }
        let fine = Complex::from_parts(sorted_names, gens);
        Subdivision { parent: parent.clone(), fine, carriers, vertex_of }
    }

    /// Reconstructs the parent/fine correspondence for a complex `fine` that is claimed
    /// to be the barycentric subdivision of `parent`.
    pub fn recover(parent: &Complex, fine: &Complex) -> Result<Subdivision, ComplexError> {
        let sd = Subdivision::of(parent);
        if &sd.fine != fine {
            return Err(ComplexError::NotSubdivision(
                "complex is not the barycentric subdivision of the given parent".into(),
            ));
        }
        Ok(sd)
    }

    /// Parent simplex whose barycenter is fine vertex `v`.
    pub fn carrier(&self, v: usize) -> &Simplex {
        &self.carriers[v]
    }

    pub fn carriers(&self) -> &[Simplex] {
        &self.carriers
    }

    /// Fine vertex standing for the barycenter of a parent simplex.
    pub fn vertex_of(&self, s: &Simplex) -> Option<usize> {
        self.vertex_of.get(s).copied()
    }

    /// The chain of parent simplices making up a fine simplex, smallest first.
    pub fn chain(&self, s: &Simplex) -> Vec<&Simplex> {
        let mut c: Vec<&Simplex> = s.vertices().iter().map(|v| &self.carriers[*v]).collect();
        c.sort_by_key(|s| s.len());
        c
    }

    /// Smallest parent simplex containing the fine simplex.
    pub fn top(&self, s: &Simplex) -> Simplex {
        s.vertices().iter().fold(Simplex::new(Vec::new()), |acc, v| acc.union(&self.carriers[*v]))
    }

    /// Subdivision of a parent subcomplex, as a subcomplex of the fine complex.
    pub fn subdivide_subcomplex(&self, a: &Subcomplex) -> Subcomplex {
        Subcomplex {
            simplices: self
                .fine
                .simplices()
                .filter(|s| s.vertices().iter().all(|v| a.contains(&self.carriers[*v])))
                .cloned()
                .collect(),
        }
    }
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let first = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, first);
            out.push(p);
        }
    }
    out
}
