//! A deterministic simulator of an associative-processor brain.
//!
//! Short-term memory is a fixed-layout register of 4-bit attributes that
//! decay tick by tick. Long-term memory is a write-once associative store
//! searched with cues taken from STM. When a search comes back empty the cue
//! editor gates cues off until something is recalled; recalls pass an
//! importance gate before they dominate STM. State machines stored in LTM
//! rewrite STM with reversible FM/TO nanocode, which is enough to reduce
//! `2x + 5 = 11` to `x = 3` or to swap Left and Right on the way home.

pub mod config;
pub mod cue_editor;
pub mod error;
pub mod importance;
pub mod ltm;
pub mod memory;
pub mod nanocode;
pub mod orchestrator;
pub mod state_machine;

pub use config::{Config, MultiMatchPolicy};
pub use error::{Error, Result};
pub use ltm::{Ltm, LtmWord, SearchCues, SearchOutcome, WordId};
pub use memory::{AttributeSchema, Bus, FieldId, Nibble, StmWord};
pub use orchestrator::World;
