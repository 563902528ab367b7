# Differentiable computation core for the capacity toolkit
# Tensors, the op set, backward, optimizers and gradient checking

from .gradcheck import GradCheckReport, gradient_check, relative_error
from .nn import MLP, Dense, Module
from .optim import OptimizerConfig, optimizer_step
from .serialization import load_parameters, read_parameter_file, save_parameters
from .tensor import (
    LOG_FLOOR,
    Parameter,
    Tensor,
    add,
    as_tensor,
    backward,
    bias_add,
    clip,
    concat,
    div,
    exp,
    is_grad_enabled,
    leaky_relu,
    log,
    matmul,
    mean,
    mul,
    nll,
    no_grad,
    power,
    scale,
    softmax,
    softplus,
    sqrt,
    sub,
    take,
    zero_grads,
)
from .tensor import sum as reduce_sum
