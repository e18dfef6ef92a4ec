//! Special monoid presentations: rewriting, units analysis, Cayley graph
//! structure, Bass–Serre style constructions and integer chain complexes.

pub mod cayley;
pub mod constructions;
pub mod diagnostics;
pub mod error;
pub mod graph;
pub mod homology;
pub mod presentation;
pub mod rewriting;
pub mod special;

pub use cayley::{
    cayley_ball, cayley_complex_chain, check_rooted_tree, check_unique_entrance,
    hasse_prefix_tree, scc_condense, ChainComplexExport, CondensationReport, LabeledDigraph,
};
pub use diagnostics::Diagnostic;
pub use error::{Error, Result};
pub use presentation::{
    parse_presentation, primitive_root, serialize_presentation, validate_special, Alphabet,
    Letter, Presentation, Relation, SpecialPresentation, Word,
};
pub use rewriting::{
    congruence_ball, critical_pairs, equal_words, knuth_bendix, CompletionResult,
    EqualityContext, NormalFormSolver, RewriteRule, RewriteSystem, SystemStatus, Verdict,
    VerdictValue,
};
pub use special::{analyze_special, torsion_flag, AnalysisOptions, TorsionInfo, UnitsAnalysis};
pub use homology::{
    chain_homology, check_boundary_injective, exactness_check, kernel_basis, rank_exact,
    smith_normal_form,
    ChainComplex, IntScalar, SparseMatrix,
};

/// Arbitrary-precision integer used by the concrete aliases below.
pub use num_bigint::BigInt;
pub type IntMatrix = SparseMatrix<BigInt>;
pub type IntSmithForm = homology::SmithForm<BigInt>;
pub type IntChainComplex = ChainComplex<BigInt>;
pub type IntHomologyReport = homology::HomologyReport<BigInt>;
pub type IntExactnessReport = homology::ExactnessReport<BigInt>;
