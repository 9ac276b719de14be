//! Network, traffic and activation model shared by every solver.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::scalar::Rational;

pub type VertexId = usize;
pub type ArcId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DuplexMode {
    /// Every arc is an independent link.
    Simplex,
    /// Opposite arcs form one link and are (de)activated together.
    FullDuplex,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetError {
    #[error("network has no arcs")]
    Empty,
    #[error("arc {tail}->{head} references a vertex outside 0..{num_vertices}")]
    UnknownVertex {
        tail: VertexId,
        head: VertexId,
        num_vertices: usize,
    },
    #[error("arc {0}->{0} is a self-loop")]
    SelfLoop(VertexId),
    #[error("duplicate arc {0}->{1}")]
    DuplicateArc(VertexId, VertexId),
    #[error("arc {0}->{1} has a non-positive parameter")]
    NonPositiveParameter(VertexId, VertexId),
    #[error("full-duplex arc {0}->{1} has no reverse arc")]
    MissingReverseArc(VertexId, VertexId),
    #[error("full-duplex arcs {0}->{1} and {1}->{0} disagree on capacity or connection count")]
    InconsistentDuplex(VertexId, VertexId),
    #[error("self-demand at vertex {0}")]
    SelfDemand(VertexId),
    #[error("negative demand {0}->{1}")]
    NegativeDemand(VertexId, VertexId),
    #[error("scale factor must be positive")]
    NonPositiveFactor,
    #[error("activation has {got} entries, network has {expected} arcs")]
    ActivationLength { got: usize, expected: usize },
    #[error("activation of arc {arc} is {count}, exceeds its {mu} connections")]
    ActivationExceedsConnections { arc: ArcId, count: u32, mu: u32 },
    #[error("activation differs between full-duplex arcs {0} and {1}")]
    AsymmetricActivation(ArcId, ArcId),
}

/// Input description of one arc.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcSpec {
    pub tail: VertexId,
    pub head: VertexId,
    /// Capacity of a single connection.
    pub ccap: Rational,
    pub len: u64,
    /// Number of independently switchable connections.
    pub mu: u32,
}

impl ArcSpec {
    pub fn new(tail: VertexId, head: VertexId, ccap: Rational, len: u64, mu: u32) -> Self {
        Self {
            tail,
            head,
            ccap,
            len,
            mu,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arc {
    pub id: ArcId,
    pub tail: VertexId,
    pub head: VertexId,
    pub ccap: Rational,
    pub len: u64,
    pub mu: u32,
}

impl Arc {
    /// Capacity with every connection active.
    pub fn fcap(&self) -> Rational {
        &self.ccap * Rational::from_integer(self.mu.into())
    }
}

/// Directed graph without parallel arcs. Arc ids are dense and follow input order.
#[derive(Debug, Clone)]
pub struct Network {
    num_vertices: usize,
    arcs: Vec<Arc>,
    mode: DuplexMode,
    link_pair: Option<Vec<ArcId>>,
    out_arcs: Vec<Vec<ArcId>>,
    in_arcs: Vec<Vec<ArcId>>,
    by_endpoints: HashMap<(VertexId, VertexId), ArcId>,
}

impl Network {
    /// Validates `specs` and builds the network.
    ///
    /// In full-duplex mode every arc needs a reverse partner; partner lengths
    /// are harmonized to their minimum, while differing capacities or
    /// connection counts are rejected.
    pub fn build(
        num_vertices: usize,
        specs: &[ArcSpec],
        mode: DuplexMode,
    ) -> Result<Self, NetError> {
        if specs.is_empty() {
            return Err(NetError::Empty);
        }
        let mut arcs = Vec::with_capacity(specs.len());
        let mut by_endpoints = HashMap::with_capacity(specs.len());
        for (id, spec) in specs.iter().enumerate() {
            if spec.tail >= num_vertices || spec.head >= num_vertices {
                return Err(NetError::UnknownVertex {
                    tail: spec.tail,
                    head: spec.head,
                    num_vertices,
                });
            }
            if spec.tail == spec.head {
                return Err(NetError::SelfLoop(spec.tail));
            }
            if spec.len == 0 || spec.mu == 0 || spec.ccap <= Rational::zero() {
                return Err(NetError::NonPositiveParameter(spec.tail, spec.head));
            }
            if by_endpoints.insert((spec.tail, spec.head), id).is_some() {
                return Err(NetError::DuplicateArc(spec.tail, spec.head));
            }
            arcs.push(Arc {
                id,
                tail: spec.tail,
                head: spec.head,
                ccap: spec.ccap.clone(),
                len: spec.len,
                mu: spec.mu,
            });
        }

        let link_pair = match mode {
            DuplexMode::Simplex => None,
            DuplexMode::FullDuplex => {
                let mut pair = vec![0; arcs.len()];
                for id in 0..arcs.len() {
                    let (tail, head) = (arcs[id].tail, arcs[id].head);
                    let rev = *by_endpoints
                        .get(&(head, tail))
                        .ok_or(NetError::MissingReverseArc(tail, head))?;
                    if arcs[id].ccap != arcs[rev].ccap || arcs[id].mu != arcs[rev].mu {
                        return Err(NetError::InconsistentDuplex(tail, head));
                    }
                    let len = arcs[id].len.min(arcs[rev].len);
                    arcs[id].len = len;
                    arcs[rev].len = len;
                    pair[id] = rev;
                }
                Some(pair)
            }
        };

        let mut out_arcs = vec![Vec::new(); num_vertices];
        let mut in_arcs = vec![Vec::new(); num_vertices];
        for arc in &arcs {
            out_arcs[arc.tail].push(arc.id);
            in_arcs[arc.head].push(arc.id);
        }
        Ok(Self {
            num_vertices,
            arcs,
            mode,
            link_pair,
            out_arcs,
            in_arcs,
            by_endpoints,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, id: ArcId) -> &Arc {
        &self.arcs[id]
    }

    pub fn mode(&self) -> DuplexMode {
        self.mode
    }

    pub fn out_arcs(&self, v: VertexId) -> &[ArcId] {
        &self.out_arcs[v]
    }

    pub fn in_arcs(&self, v: VertexId) -> &[ArcId] {
        &self.in_arcs[v]
    }

    pub fn find_arc(&self, tail: VertexId, head: VertexId) -> Option<ArcId> {
        self.by_endpoints.get(&(tail, head)).copied()
    }

    /// Reverse partner of `arc` in full-duplex mode.
    pub fn link_partner(&self, arc: ArcId) -> Option<ArcId> {
        self.link_pair.as_ref().map(|p| p[arc])
    }

    /// Representative arc of the link containing `arc`: the smaller id of the
    /// two partners in full-duplex mode, `arc` itself otherwise.
    pub fn link_of(&self, arc: ArcId) -> ArcId {
        match self.link_partner(arc) {
            Some(rev) => arc.min(rev),
            None => arc,
        }
    }

    /// Arc ids that represent a link, in increasing order.
    pub fn links(&self) -> Vec<ArcId> {
        (0..self.num_arcs())
            .filter(|&a| self.link_of(a) == a)
            .collect()
    }

    pub fn total_connections(&self) -> u64 {
        self.arcs.iter().map(|a| u64::from(a.mu)).sum()
    }

    pub fn min_connections(&self) -> u32 {
        self.arcs.iter().map(|a| a.mu).min().unwrap_or(0)
    }

    /// `true` iff every arc is a shortest path between its endpoints.
    pub fn is_one_shortest(&self) -> bool {
        (0..self.num_vertices).all(|s| {
            let dist = crate::routing::distances_from(self, s, |_| true);
            self.out_arcs[s]
                .iter()
                .all(|&a| dist[self.arcs[a].head] == Some(self.arcs[a].len))
        })
    }
}

/// Nonnegative demand per ordered vertex pair. Only positive demands are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrafficMatrix {
    num_vertices: usize,
    demands: BTreeMap<(VertexId, VertexId), Rational>,
}

impl TrafficMatrix {
    pub fn new(num_vertices: usize) -> Self {
        Self {
            num_vertices,
            demands: BTreeMap::new(),
        }
    }

    pub fn from_entries<I>(num_vertices: usize, entries: I) -> Result<Self, NetError>
    where
        I: IntoIterator<Item = (VertexId, VertexId, Rational)>,
    {
        let mut t = Self::new(num_vertices);
        for (s, d, v) in entries {
            t.add(s, d, v)?;
        }
        Ok(t)
    }

    /// Adds `volume` to the demand of `(s, t)`; zero volumes are ignored.
    pub fn add(&mut self, s: VertexId, t: VertexId, volume: Rational) -> Result<(), NetError> {
        if s == t {
            return Err(NetError::SelfDemand(s));
        }
        if volume < Rational::zero() {
            return Err(NetError::NegativeDemand(s, t));
        }
        if volume.is_zero() {
            return Ok(());
        }
        *self.demands.entry((s, t)).or_insert_with(Rational::zero) += volume;
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn demand(&self, s: VertexId, t: VertexId) -> Rational {
        self.demands
            .get(&(s, t))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Terminal pairs with their demands, ordered by `(s, t)`.
    pub fn iter(&self) -> impl Iterator<Item = ((VertexId, VertexId), &Rational)> {
        self.demands.iter().map(|(&k, v)| (k, v))
    }

    pub fn terminals(&self) -> Vec<(VertexId, VertexId)> {
        self.demands.keys().copied().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.demands.is_empty()
    }

    pub fn len(&self) -> usize {
        self.demands.len()
    }

    pub fn total(&self) -> Rational {
        self.demands
            .values()
            .fold(Rational::zero(), |acc, v| acc + v)
    }

    /// Every demand multiplied by `factor`; the terminal set is unchanged.
    pub fn scaled(&self, factor: &Rational) -> Result<Self, NetError> {
        if factor <= &Rational::zero() {
            return Err(NetError::NonPositiveFactor);
        }
        Ok(Self {
            num_vertices: self.num_vertices,
            demands: self.demands.iter().map(|(&k, v)| (k, v * factor)).collect(),
        })
    }
}

/// See [`TrafficMatrix::scaled`].
pub fn scale_traffic(t: &TrafficMatrix, factor: &Rational) -> Result<TrafficMatrix, NetError> {
    t.scaled(factor)
}

/// Number of active connections per arc.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Activation {
    counts: Vec<u32>,
}

impl Activation {
    /// Validates `0 <= counts[a] <= mu(a)` and duplex symmetry.
    pub fn new(net: &Network, counts: Vec<u32>) -> Result<Self, NetError> {
        if counts.len() != net.num_arcs() {
            return Err(NetError::ActivationLength {
                got: counts.len(),
                expected: net.num_arcs(),
            });
        }
        for arc in net.arcs() {
            if counts[arc.id] > arc.mu {
                return Err(NetError::ActivationExceedsConnections {
                    arc: arc.id,
                    count: counts[arc.id],
                    mu: arc.mu,
                });
            }
            if let Some(rev) = net.link_partner(arc.id) {
                if counts[rev] != counts[arc.id] {
                    return Err(NetError::AsymmetricActivation(arc.id, rev));
                }
            }
        }
        Ok(Self { counts })
    }

    /// All connections of every arc active.
    pub fn full(net: &Network) -> Self {
        Self {
            counts: net.arcs().iter().map(|a| a.mu).collect(),
        }
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn count(&self, arc: ArcId) -> u32 {
        self.counts[arc]
    }

    pub fn is_active(&self, arc: ArcId) -> bool {
        self.counts[arc] > 0
    }

    /// Total number of active connections.
    pub fn value(&self) -> u64 {
        self.counts.iter().map(|&c| u64::from(c)).sum()
    }

    /// Capacity of `arc` in the subnetwork.
    pub fn capacity(&self, net: &Network, arc: ArcId) -> Rational {
        &net.arc(arc).ccap * Rational::from_integer(self.counts[arc].into())
    }

    /// Share of connections switched off relative to `full`.
    pub fn deactivated_fraction(&self, net: &Network) -> Rational {
        let full = net.total_connections();
        if full == 0 {
            return Rational::zero();
        }
        Rational::one() - Rational::new(self.value().into(), full.into())
    }
}

/// See [`Activation::full`].
pub fn full_activation(net: &Network) -> Activation {
    Activation::full(net)
}
