//! Detecting and tracking comment-spam campaigns on video sites from the
//! shape of each user's egocentric comment network.

pub mod graph;
pub mod graphbuild;
pub mod ingest;
pub mod motif;
pub mod profile;
pub mod synth;
pub mod textnorm;
pub mod tracking;
pub mod pipeline;
pub mod plot;
