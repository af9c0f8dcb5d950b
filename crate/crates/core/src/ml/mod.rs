//! Estimators built on distributed arrays.

pub mod als;
pub mod kmeans;

pub use als::{als_fit, als_full, als_predict, Als, AlsModel};
pub use kmeans::{kmeans_fit, kmeans_predict, KMeans, KMeansModel};
