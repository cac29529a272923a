//! Domain-specific multilingual word embeddings.
//!
//! Monolingual skip-gram spaces are trained per language on seed-filtered
//! corpora, aligned into the space of a pivot language with CCA over a
//! domain bilingual lexicon, and evaluated three ways:
//!
//! * cross-lingual nearest neighbors and BLI precision@k ([`retrieval`]),
//! * association-rule contexts and context similarity ([`rules`], [`similarity`]),
//! * zero-shot cross-lingual classification ([`classify`]).
//!
//! Runnable walkthroughs for each capability live in `examples/`:
//!
//! ```bash
//! cargo run -p xlemb --example embeddings_io
//! cargo run -p xlemb --example train_sgns
//! cargo run -p xlemb --example cca_alignment
//! cargo run -p xlemb --example bli_eval
//! cargo run -p xlemb --example context_similarity
//! cargo run -p xlemb --example zero_shot
//! cargo run -p xlemb --example pipeline
//! ```

pub mod alignment;
pub mod classify;
pub mod cli;
pub mod corpus;
pub mod dataset;
pub mod embedding;
pub mod error;
pub mod lexicon;
pub mod retrieval;
pub mod rules;
pub mod sgns;
pub mod similarity;
pub mod stopwords;
pub mod synthetic;

pub use alignment::{fit_cca, fit_hub_alignment, AlignConfig, AlignmentModel, CcaResult, SpaceSet};
pub use classify::{evaluate, featurize, train_logreg, zero_shot_eval, ClassifierModel, ClassifyConfig, EvalMode, Metrics};
pub use corpus::{build_vocab, filter_corpus, tokenize, TokenizerConfig};
pub use dataset::{load_labeled_dataset, Label, LabeledDataset};
pub use embedding::{cosine, load_embeddings, save_embeddings, EmbeddingSpace};
pub use error::{Error, Result};
pub use lexicon::{load_lexicon, restrict_to_vocab, split_lexicon, BilingualLexicon};
pub use retrieval::{bli_precision_at_k, knn, NeighborList, SharedSpace};
pub use rules::{build_context, mine_rules, AssociationRule, MiningConfig, WordContext};
pub use sgns::{train_sgns, SgnsConfig};
pub use similarity::{context_sim, cross_lingual_report, met_sim, word_sim, SimVariant};
