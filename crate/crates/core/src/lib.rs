//! Planning-structure toolkit: SAS+-style planning instances, causal graphs,
//! 3SAT hardness gadgets with exact causal-graph shapes, solvability
//! preserving transforms, and brute-force and component-wise planners.

pub mod embed;
pub mod graph;
pub mod planning;
pub mod sat;
pub mod solver;
pub mod transform;

pub use graph::{Budget, Digraph, GraphError, UGraph};
pub use planning::{Operator, PartialState, Plan, PlanningError, PlanningInstance, State, Variable};
pub use sat::{CnfFormula, Literal};
pub use solver::{PlanOutcome, SearchBudget};
