//! Synthetic quality data and the least-squares fit of the quality model.

mod dataset;
mod fit;

pub use dataset::{
    generate_dataset, generate_dataset_with, read_dataset_csv, write_dataset_csv, GeneratorSpec,
    QualityDataset, QualityRow,
};
pub use fit::{fit_ols, FitReport};
