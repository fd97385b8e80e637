"""Train small bagged ensembles and sweep their capacity."""
from .cart import CartTree, fit_cart_tree
from .data import Dataset, load_dataset_csv, make_blobs, save_dataset_csv
from .ensemble import (
    Cart,
    RandomFeatures,
    SweepResult,
    SweepRow,
    TrainedEnsemble,
    capacity_sweep,
    make_family,
    train_bagged_ensemble,
)
from .features import random_relu_features, relu_features, sphere_directions
from .logistic import LinearModel, fit_multinomial_logistic, loss_and_grad

__all__ = [
    "Cart",
    "CartTree",
    "Dataset",
    "LinearModel",
    "RandomFeatures",
    "SweepResult",
    "SweepRow",
    "TrainedEnsemble",
    "capacity_sweep",
    "fit_cart_tree",
    "fit_multinomial_logistic",
    "load_dataset_csv",
    "loss_and_grad",
    "make_blobs",
    "make_family",
    "random_relu_features",
    "relu_features",
    "save_dataset_csv",
    "sphere_directions",
    "train_bagged_ensemble",
]
