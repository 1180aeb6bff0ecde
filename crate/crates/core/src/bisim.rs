//! Strong bisimilarity on finite reachable transition systems by partition refinement.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::simulate::{SimError, Simulator};
use crate::spec::Spec;
use crate::terms::{canon_term, Label, Term};
use crate::validate::{check_guarded_defs, ViolationKind};

pub const DEFAULT_STATE_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BisimError {
    #[error("state cap of {0} exceeded; the behaviour may be infinite")]
    StateCapExceeded(usize),
    #[error("recursion constant {0} is not guarded")]
    UnguardedDef(String),
    #[error("definition of {0} uses operators other than 0, prefix and choice")]
    DefOutsideBccsp(String),
    #[error("{0} is not a recursion constant")]
    NotADefinition(String),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Explored transition system. States are canonical closed terms; labels are interned.
#[derive(Clone, Debug, Default)]
pub struct Lts {
    pub states: Vec<Term>,
    pub labels: Vec<Label>,
    /// Per state, `(label index, target state)` pairs without duplicates.
    pub transitions: Vec<Vec<(usize, usize)>>,
    pub roots: Vec<usize>,
    index: HashMap<Term, usize>,
    label_index: HashMap<Label, usize>,
}

impl Lts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, t: &Term) -> Option<usize> {
        self.index.get(t).copied()
    }

    /// Returns the state's index and whether it was new.
    pub fn add_state(&mut self, t: Term) -> (usize, bool) {
        if let Some(&i) = self.index.get(&t) {
            return (i, false);
        }
        let i = self.states.len();
        self.index.insert(t.clone(), i);
        self.states.push(t);
        self.transitions.push(Vec::new());
        (i, true)
    }

    pub fn label_id(&mut self, l: &Label) -> usize {
        if let Some(&i) = self.label_index.get(l) {
            return i;
        }
        let i = self.labels.len();
        self.label_index.insert(l.clone(), i);
        self.labels.push(l.clone());
        i
    }

    pub fn add_transition(&mut self, from: usize, label: &Label, to: usize) {
        let l = self.label_id(label);
        if !self.transitions[from].contains(&(l, to)) {
            self.transitions[from].push((l, to));
        }
    }

    /// An LTS over anonymous states `s0 … s{n-1}`, for exercising the refinement directly.
    pub fn from_edges(n: usize, edges: &[(usize, &str, usize)]) -> Self {
        let mut lts = Lts::new();
        for i in 0..n {
            lts.add_state(Term::Def(format!("s{i}")));
        }
        for &(from, l, to) in edges {
            lts.add_transition(from, &Label::action(l), to);
        }
        lts
    }
}

/// Breadth-first closure of `roots` under the one-step semantics.
pub fn build_lts(spec: &Spec, roots: &[Term], state_cap: usize) -> Result<Lts, BisimError> {
    let mut sim = Simulator::new(spec);
    let th = spec.theory();
    let mut lts = Lts::new();
    let mut queue = VecDeque::new();
    for r in roots {
        if !r.is_closed() {
            return Err(SimError::OpenTerm(r.to_string()).into());
        }
        let (i, fresh) = lts.add_state(canon_term(r, &th));
        lts.roots.push(i);
        if fresh {
            queue.push_back(i);
        }
    }
    if lts.len() > state_cap {
        return Err(BisimError::StateCapExceeded(state_cap));
    }
    while let Some(s) = queue.pop_front() {
        let term = lts.states[s].clone();
        for st in sim.step(&term)? {
            let (t, fresh) = lts.add_state(canon_term(&st.target, &th));
            if fresh {
                if lts.len() > state_cap {
                    return Err(BisimError::StateCapExceeded(state_cap));
                }
                queue.push_back(t);
            }
            lts.add_transition(s, &st.label, t);
        }
    }
    Ok(lts)
}

/// Coarsest stable partition: block number per state. Blocks are split by the set of
/// `(label, target block)` pairs until no block splits any more.
pub fn refine(lts: &Lts) -> Vec<usize> {
    let n = lts.len();
    let mut block = vec![0usize; n];
    let mut count = usize::from(n > 0);
    loop {
        let mut ids: HashMap<(usize, Vec<(usize, usize)>), usize> = HashMap::new();
        let mut next = vec![0usize; n];
        for s in 0..n {
            let sig: BTreeSet<(usize, usize)> =
                lts.transitions[s].iter().map(|&(l, t)| (l, block[t])).collect();
            let key = (block[s], sig.into_iter().collect());
            let fresh = ids.len();
            next[s] = *ids.entry(key).or_insert(fresh);
        }
        let new_count = ids.len();
        block = next;
        if new_count == count {
            return block;
        }
        count = new_count;
    }
}

/// Related state pairs, in the asymmetric form reachable from the root pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BisimWitness {
    pub pairs: Vec<(Term, Term)>,
}

impl BisimWitness {
    /// The relation together with its mirror image, which is the actual bisimulation.
    pub fn symmetric_closure(&self) -> BTreeSet<(Term, Term)> {
        self.pairs.iter().flat_map(|(a, b)| [(a.clone(), b.clone()), (b.clone(), a.clone())]).collect()
    }
}

impl fmt::Display for BisimWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs.iter().map(|(a, b)| format!("< {a} ; {b} >")).collect();
        f.write_str(&parts.join(" "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bisimilarity {
    pub bisimilar: bool,
    pub witness: Option<BisimWitness>,
}

impl Serialize for Bisimilarity {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let mut st = ser.serialize_struct("Bisimilarity", 2)?;
        st.serialize_field("bisimilar", &self.bisimilar)?;
        let pairs: Vec<[String; 2]> = self
            .witness
            .iter()
            .flat_map(|w| w.pairs.iter().map(|(a, b)| [a.to_string(), b.to_string()]))
            .collect();
        st.serialize_field("witness", &pairs)?;
        st.end()
    }
}

impl Bisimilarity {
    /// `< true ; < p ; q > … >` or `< false >`.
    pub fn summary(&self) -> String {
        match &self.witness {
            Some(w) if self.bisimilar => format!("< true ; {w} >"),
            _ => "< false >".to_string(),
        }
    }
}

/// Pairs of same-block states reachable from `(p, q)` by matching moves.
fn witness_pairs(lts: &Lts, block: &[usize], p: usize, q: usize) -> Vec<(usize, usize)> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([(p, q)]);
    seen.insert((p, q));
    while let Some((s, t)) = queue.pop_front() {
        for &(l, s2) in &lts.transitions[s] {
            for &(l2, t2) in &lts.transitions[t] {
                if l == l2 && block[s2] == block[t2] && seen.insert((s2, t2)) {
                    queue.push_back((s2, t2));
                }
            }
        }
    }
    seen.into_iter().collect()
}

/// Decide `p ~ q` inside an explored transition system.
pub fn bisimilar_states(lts: &Lts, p: usize, q: usize) -> (bool, Option<Vec<(usize, usize)>>) {
    let block = refine(lts);
    if block[p] != block[q] {
        return (false, None);
    }
    (true, Some(witness_pairs(lts, &block, p, q)))
}

pub fn bisimilar(spec: &Spec, p: &Term, q: &Term, state_cap: usize) -> Result<Bisimilarity, BisimError> {
    let lts = build_lts(spec, &[p.clone(), q.clone()], state_cap)?;
    let (ps, qs) = (lts.roots[0], lts.roots[1]);
    let (answer, pairs) = bisimilar_states(&lts, ps, qs);
    let witness = pairs.map(|pairs| {
        let mut rendered: Vec<(String, (Term, Term))> = pairs
            .into_iter()
            .map(|(a, b)| {
                let (a, b) = (lts.states[a].clone(), lts.states[b].clone());
                (format!("{a} ; {b}"), (a, b))
            })
            .collect();
        rendered.sort_by(|x, y| x.0.cmp(&y.0));
        BisimWitness { pairs: rendered.into_iter().map(|(_, p)| p).collect() }
    });
    Ok(Bisimilarity { bisimilar: answer, witness })
}

/// Equality of two guarded recursive constants over the core calculus.
pub fn are_equal(spec: &Spec, c1: &str, c2: &str, state_cap: usize) -> Result<Bisimilarity, BisimError> {
    for c in [c1, c2] {
        if spec.def(c).is_none() {
            return Err(BisimError::NotADefinition(c.to_string()));
        }
    }
    if let Some(v) = check_guarded_defs(spec).into_iter().next() {
        let name = v.def.unwrap_or_default();
        return Err(match v.kind {
            ViolationKind::DefOutsideBccsp => BisimError::DefOutsideBccsp(name),
            _ => BisimError::UnguardedDef(name),
        });
    }
    bisimilar(spec, &Term::Def(c1.to_string()), &Term::Def(c2.to_string()), state_cap)
}
