"""Randomized prediction games for adversarial classification."""

from ._core import (
    BaselineSvm,
    Dataset,
    DiagnosticsReport,
    DomainError,
    EquilibriumResult,
    IoError,
    LearnerParams,
    ParseError,
    SecurityCurve,
    ShapeError,
    TrainedGame,
    attack_dataset,
    check_equilibrium,
    hinge_expect,
    load_dataset,
    save_dense_csv,
    security_curve,
    synth_2d,
    tp_at_fp,
    train_baseline_svm,
    train_game,
)

__all__ = [name for name in dir() if not name.startswith("_")]
