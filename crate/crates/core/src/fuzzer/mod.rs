//! Coverage-guided mutation-based fuzzing: the trace bitmap, novelty
//! detection, deterministic and randomized mutation stages, queue scheduling,
//! crash collection and campaign statistics.

mod bitmap;
mod campaign;
mod encode;
mod havoc;
mod mutate;
mod queue;

pub use bitmap::{bucket_of_count, GlobalCoverage, Signature, TraceBitmap, MAP_SIZE};
pub use campaign::{FuzzCampaign, FuzzConfig, FuzzSnapshot, FuzzStats};
pub use encode::ByteEncoding;
pub use havoc::{havoc, splice, splice_entries};
pub use mutate::{deterministic_mutation_count, DeterministicMutations};
pub use queue::QueueEntry;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FuzzError {
    #[error("splice requires two entries with different coverage signatures")]
    IdenticalSignatures,
    #[error("the seed corpus must contain at least one trace")]
    EmptySeedCorpus,
    #[error("the campaign budget must be positive")]
    ZeroBudget,
    #[error("alphabet labels are not single bytes; declare an explicit byte table")]
    NoByteEncoding,
}
