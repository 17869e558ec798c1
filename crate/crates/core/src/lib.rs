//! Constructive packing of random graphs and k-uniform hypergraphs.
//!
//! A packing of two hypergraphs on `n` vertices is a bijection between their
//! vertex sets that maps no edge of the first onto an edge of the second.
//! The packers here build such bijections class by class, using equitable
//! colourings and perfect matchings in bipartite disjointness graphs. Every
//! packing they report is verified; failures are only certified negative
//! when they come from the exact oracle.

pub mod combinatorics;
pub mod edgelist;
pub mod equitable;
pub mod error;
pub mod hypergraph;
pub mod matching;
pub mod oracle;
pub mod pack;
pub mod partition;
pub mod seed;

pub use edgelist::{read_edge_list, write_edge_list};
pub use equitable::{equitable_coloring, is_equitable_coloring};
pub use error::{Error, Result};
pub use hypergraph::{
    generate_random, unpackable_graph_pair, unpackable_hypergraph_pair, CoupledSample, GenParams, Hypergraph,
};
pub use matching::{
    build_disjointness_graph, disjoint_count, maximum_matching, min_degree, BipartiteDisjointnessGraph, HallViolator,
    MatchResult, MatchStatus, SetSequence, Side,
};
pub use oracle::{
    binomial_tail_flag, chernoff_lower, chernoff_upper, count_packings, exact_pack, expected_packings_bound,
    BoundInputs, OracleConfig, TailFlag,
};
pub use pack::{
    pack_graphs, pack_hypergraphs, pack_many, verify_packing, Failure, FailureReason, ManyOutcome, PackOutcome,
    PackerParams, PackingMap,
};
pub use partition::{
    classify_edge_type, independence_refine, random_color_partition, EdgeType, PartitionParams, VertexPartition,
};
