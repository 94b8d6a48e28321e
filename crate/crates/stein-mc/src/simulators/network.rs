//! Four-node communication network delay simulator.
//!
//! Topology: nodes 1..4 on a cycle, edge `e_i` connecting node `i` to node
//! `(i mod 4)+1`. The route for an ordered pair is the clockwise shortest
//! path with ties broken clockwise. Messages arrive per ordered pair via
//! Poisson processes, carry Exp-distributed lengths, incur a fixed processing
//! latency at every visited node (destination included), and occupy each edge
//! on their route for `l/capacity + edge_length/speed` seconds under per-edge
//! FIFO with a single server and unlimited queueing. The system starts empty
//! and the value of interest is the mean delay of the first `n_messages`
//! arrivals, averaged over replications.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rand_distr::{Distribution, Exp};

use crate::error::{Error, Result};
use crate::scored::ScoredTarget;
use crate::seeds;

pub const NODES: usize = 4;
pub const PAIRS: usize = 12;

/// Ordered node pairs `(i, j)`, 1-based, in row-major order. This is the
/// coordinate order of every 12-vector of rates in the crate.
pub fn pair_order() -> [(usize, usize); PAIRS] {
    let mut out = [(0, 0); PAIRS];
    let mut k = 0;
    for i in 1..=NODES {
        for j in 1..=NODES {
            if i != j {
                out[k] = (i, j);
                k += 1;
            }
        }
    }
    out
}

/// Clockwise-shortest route from node `i` to node `j` as 0-based edge ids,
/// where edge `e` runs between node `e+1` and node `(e+1) mod 4 + 1`.
pub fn cycle_route(i: usize, j: usize) -> Vec<usize> {
    assert!(i != j && (1..=NODES).contains(&i) && (1..=NODES).contains(&j));
    let cw = (j + NODES - i) % NODES;
    if cw <= NODES - cw {
        // clockwise: i -> i+1 -> ... -> j, stepping over edge e_v from node v
        (0..cw).map(|s| (i - 1 + s) % NODES).collect()
    } else {
        // counterclockwise: node v -> v-1 crosses edge e_{v-1}
        (0..NODES - cw)
            .map(|s| (i + NODES - 2 - s) % NODES)
            .collect()
    }
}

/// Simulator configuration (paper-scale defaults).
#[derive(Debug, Clone)]
pub struct NetworkConfig {
    pub mean_msg_length_bits: f64,
    pub node_processing_s: f64,
    pub edge_capacity_bits: f64,
    pub edge_lengths_miles: [f64; NODES],
    pub speed_mps: f64,
    pub n_messages: usize,
    pub replications: usize,
    pub seed: u64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            mean_msg_length_bits: 300.0,
            node_processing_s: 0.001,
            edge_capacity_bits: 275_000.0,
            edge_lengths_miles: [100.0, 200.0, 300.0, 400.0],
            speed_mps: 150_000.0,
            n_messages: 30,
            replications: 100,
            seed: 0,
        }
    }
}

impl NetworkConfig {
    /// Time a message of `length` bits occupies edge `edge` (0-based).
    pub fn occupancy(&self, length: f64, edge: usize) -> f64 {
        length / self.edge_capacity_bits + self.edge_lengths_miles[edge] / self.speed_mps
    }

    fn validate(&self) -> Result<()> {
        if self.n_messages == 0 || self.replications == 0 {
            return Err(Error::InvalidParameter(
                "message count and replications must be positive".into(),
            ));
        }
        if !(self.mean_msg_length_bits > 0.0
            && self.edge_capacity_bits > 0.0
            && self.speed_mps > 0.0
            && self.node_processing_s >= 0.0)
        {
            return Err(Error::InvalidParameter("invalid network constants".into()));
        }
        Ok(())
    }
}

/// One edge traversal in a message's lifetime.
#[derive(Debug, Clone)]
pub struct EdgeVisit {
    pub edge: usize,
    pub requested: f64,
    pub start: f64,
    pub finish: f64,
}

/// Full record of one simulated message.
#[derive(Debug, Clone)]
pub struct MessageRecord {
    pub arrival: f64,
    pub completion: f64,
    pub length: f64,
    pub route: Vec<usize>,
    pub visits: Vec<EdgeVisit>,
}

impl MessageRecord {
    pub fn delay(&self) -> f64 {
        self.completion - self.arrival
    }
}

#[derive(Debug)]
struct Event {
    time: f64,
    seq: u64,
    kind: EventKind,
}

#[derive(Debug)]
enum EventKind {
    Request { msg: usize, hop: usize },
    Finish { msg: usize, hop: usize },
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.time == other.time && self.seq == other.seq
    }
}
impl Eq for Event {}
impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed: BinaryHeap is a max-heap, we want earliest event first
        other
            .time
            .total_cmp(&self.time)
            .then(other.seq.cmp(&self.seq))
    }
}

/// Simulates one replication and returns per-message records in arrival order.
pub fn simulate_messages(
    rates: &[f64],
    config: &NetworkConfig,
    replication: usize,
) -> Result<Vec<MessageRecord>> {
    config.validate()?;
    if rates.len() != PAIRS {
        return Err(Error::DimensionMismatch {
            expected: PAIRS,
            got: rates.len(),
        });
    }
    if rates.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
        return Err(Error::InvalidParameter(
            "arrival rates must be positive and finite".into(),
        ));
    }
    let mut rng = seeds::rng(config.seed, &[0x6e6574, replication as u64]);
    let pairs = pair_order();
    let length_dist = Exp::new(1.0 / config.mean_msg_length_bits).expect("validated");

    // merge the 12 Poisson streams, keeping only the first n_messages arrivals
    let mut next: Vec<(f64, usize)> = rates
        .iter()
        .enumerate()
        .map(|(p, &r)| (Exp::new(r).expect("validated").sample(&mut rng), p))
        .collect();
    let mut messages: Vec<MessageRecord> = Vec::with_capacity(config.n_messages);
    for _ in 0..config.n_messages {
        let (slot, &(t, p)) = next
            .iter()
            .enumerate()
            .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0).then(a.1 .1.cmp(&b.1 .1)))
            .expect("twelve streams");
        let (i, j) = pairs[p];
        messages.push(MessageRecord {
            arrival: t,
            completion: f64::NAN,
            length: length_dist.sample(&mut rng),
            route: cycle_route(i, j),
            visits: Vec::new(),
        });
        let dt: f64 = Exp::new(rates[p]).expect("validated").sample(&mut rng);
        next[slot] = (t + dt, p);
    }

    // event loop over edge requests and completions
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let push = |heap: &mut BinaryHeap<Event>, seq: &mut u64, time: f64, kind: EventKind| {
        heap.push(Event {
            time,
            seq: *seq,
            kind,
        });
        *seq += 1;
    };
    let mut edge_queue: Vec<VecDeque<(usize, usize, f64)>> =
        (0..NODES).map(|_| VecDeque::new()).collect();
    let mut edge_busy = vec![false; NODES];

    for (m, msg) in messages.iter().enumerate() {
        let t = msg.arrival + config.node_processing_s;
        if msg.route.is_empty() {
            unreachable!("routes between distinct nodes are nonempty");
        }
        push(&mut heap, &mut seq, t, EventKind::Request { msg: m, hop: 0 });
    }

    while let Some(ev) = heap.pop() {
        match ev.kind {
            EventKind::Request { msg, hop } => {
                let edge = messages[msg].route[hop];
                if edge_busy[edge] {
                    edge_queue[edge].push_back((msg, hop, ev.time));
                } else {
                    edge_busy[edge] = true;
                    let occ = config.occupancy(messages[msg].length, edge);
                    messages[msg].visits.push(EdgeVisit {
                        edge,
                        requested: ev.time,
                        start: ev.time,
                        finish: ev.time + occ,
                    });
                    push(
                        &mut heap,
                        &mut seq,
                        ev.time + occ,
                        EventKind::Finish { msg, hop },
                    );
                }
            }
            EventKind::Finish { msg, hop } => {
                let edge = messages[msg].route[hop];
                // node processing at the node just reached
                let after_node = ev.time + config.node_processing_s;
                if hop + 1 < messages[msg].route.len() {
                    push(
                        &mut heap,
                        &mut seq,
                        after_node,
                        EventKind::Request { msg, hop: hop + 1 },
                    );
                } else {
                    messages[msg].completion = after_node;
                }
                // hand the edge to the next queued message
                if let Some((m2, h2, requested)) = edge_queue[edge].pop_front() {
                    let occ = config.occupancy(messages[m2].length, edge);
                    messages[m2].visits.push(EdgeVisit {
                        edge,
                        requested,
                        start: ev.time,
                        finish: ev.time + occ,
                    });
                    push(
                        &mut heap,
                        &mut seq,
                        ev.time + occ,
                        EventKind::Finish { msg: m2, hop: h2 },
                    );
                } else {
                    edge_busy[edge] = false;
                }
            }
        }
    }
    Ok(messages)
}

/// `f(lambda, Y)`: mean delay of the first `n_messages` arrivals, averaged
/// over `replications` independent runs.
pub fn network_mean_delay(rates: &[f64], config: &NetworkConfig) -> Result<f64> {
    let mut total = 0.0;
    for rep in 0..config.replications {
        let msgs = simulate_messages(rates, config, rep)?;
        total += msgs.iter().map(|m| m.delay()).sum::<f64>() / msgs.len() as f64;
    }
    Ok(total / config.replications as f64)
}

/// Product-Gamma posterior over the 12 arrival rates from cumulative
/// interarrival data (which already includes the prior rate).
pub fn network_posterior(
    data: &[f64],
    l: usize,
    prior_shape: f64,
    _prior_rate: f64,
) -> Result<ScoredTarget> {
    if data.len() != PAIRS {
        return Err(Error::DimensionMismatch {
            expected: PAIRS,
            got: data.len(),
        });
    }
    if data.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidParameter(
            "cumulative interarrival data must be positive".into(),
        ));
    }
    let shapes = vec![prior_shape + l as f64; PAIRS];
    ScoredTarget::gamma_product(&shapes, data)
}

/// The three published data settings of cumulative interarrival values, in
/// [`pair_order`] coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableSetting {
    A,
    B,
    C,
}

impl TableSetting {
    pub fn cumulative(&self) -> [f64; PAIRS] {
        match self {
            TableSetting::A => [
                0.5, 0.7, 0.6, // from node 1
                0.4, 0.4, 1.2, // from node 2
                0.3, 1.2, 1.0, // from node 3
                0.8, 0.7, 0.5, // from node 4
            ],
            TableSetting::B => [0.3, 0.5, 0.4, 0.2, 0.3, 1.1, 0.2, 1.0, 0.9, 0.5, 0.4, 0.3],
            TableSetting::C => [0.4, 0.6, 0.5, 0.3, 0.4, 1.0, 0.3, 1.2, 0.7, 0.6, 0.5, 0.4],
        }
    }

    /// Posterior preset: Gamma(10,0.1) prior updated with L=10 observations.
    pub fn posterior(&self) -> Result<ScoredTarget> {
        network_posterior(&self.cumulative(), 10, 10.0, 0.1)
    }
}
