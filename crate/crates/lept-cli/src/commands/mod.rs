//! One module per subcommand; each resolves nothing itself — it receives
//! fully resolved inputs, computes, emits tables, and returns the results
//! block for the run metadata.

pub mod evolve_fit;
pub mod loop_cmd;
pub mod resultant;
pub mod spectrum;
pub mod verify_cmd;
