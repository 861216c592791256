from polsynth.eval.attacks import AttackReport, attribute_inference_attack, reidentification_attack
from polsynth.eval.classifiers import KINDS, Classifier, FeatureEncoder, train_classifier, training_loss_curve
from polsynth.eval.utility import UtilityReport, tstr

__all__ = [
    "KINDS", "AttackReport", "Classifier", "FeatureEncoder", "UtilityReport", "attribute_inference_attack",
    "reidentification_attack", "train_classifier", "training_loss_curve", "tstr",
]
