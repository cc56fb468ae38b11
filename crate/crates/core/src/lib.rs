pub mod analytics;
pub mod error;
pub mod kernel;
pub mod params;
pub mod paths;
pub mod estimation;
pub mod pipeline;
