//! Classical comparison models.

mod forest;
mod logistic;

pub use forest::{forest_fit, forest_predict_proba, ForestConfig, ForestModel, Node, Tree};
pub use logistic::{
    default_lambda_grid, logistic_fit, logistic_gradient, logistic_objective, logistic_predict_proba, LogisticModel,
    LogisticOptions, Penalty,
};
