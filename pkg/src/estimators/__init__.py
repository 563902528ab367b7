# Estimators module for the capacity toolkit
# MINE, NWJ, SMILE and the DIME family: value functions, discriminators, training

from .discrete import DiscreteJointTerms, discrete_joint_terms, discrete_mi
from .discriminator import DiscriminatorNet
from .generators import GENERATOR_NAMES, FGenerator, f_generator, gan_generator, kl_generator, scaled_kl_generator
from .sampling import BatchSource, SampleBatch, derangement, make_unpaired
from .spec import DIME_KINDS, ESTIMATOR_KINDS, EstimatorSpec, parse_estimator
from .trainer import EmaDenominator, EstimatorTrace, EstimatorTrainer, StepResult, TraceRow, train_estimator
from .value_functions import (
    EXP_LIMIT,
    ClipCounter,
    direct_gamma_estimate,
    estimate_ddime,
    estimate_fdime,
    estimate_gamma,
    expectation,
    guarded_exp,
    value_ddime,
    value_fdime,
    value_gamma,
    value_mine,
    value_nwj,
    value_smile,
)
