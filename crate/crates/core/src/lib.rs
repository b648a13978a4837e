//! Geometrize search-engine query logs.
//!
//! The pipeline turns a click log into a layered spacetime:
//!
//! 1. [`logmodel`] parses click records and splits them into clickstreams.
//! 2. [`metricspace`] measures relevance distances between clicks (tf-idf
//!    cosine or a symmetrized BM25) and arranges the t-th click of every
//!    stream into layer t.
//! 3. [`skeleton`] links nearest neighbours, forms simplex cells and embeds
//!    each layer into `n` spatial dimensions, stacking the layers along a
//!    temporal axis.
//! 4. [`geometry`] fits a metric tensor field to the embedded edges and
//!    integrates geodesics on it.
//! 5. [`diagnostics`] reports surface roughness and compares two environments.
//!
//! [`pipeline`] runs these stages from a config file with on-disk artifacts.

#![allow(clippy::needless_range_loop)]

pub mod diagnostics;
pub mod geometry;
pub mod logmodel;
pub mod metricspace;
pub mod pipeline;
pub mod skeleton;
