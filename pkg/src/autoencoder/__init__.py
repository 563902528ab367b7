# Autoencoder module for the capacity toolkit
# Encoder/decoder networks, the regularized loss and the alternating training loop

from .link_system import CodedLink, DecoderNet, EncoderNet, LinkSystem, one_hot
from .loss import ae_loss, cross_entropy, decode_hard, decode_hard_batch, smoothed_target_batch, smoothed_targets
from .trainer import AEConfig, AEReportRow, AETrainingReport, check_power_constraint, train_autoencoder
