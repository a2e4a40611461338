"""从零实现的卷积网络引擎包.

包含张量与随机数基础、各层前向/反向、由结构描述实例化的网络以及梯度检查。
"""

from .activation import ReLULayer, relu_backward, relu_forward
from .batchnorm import BatchNormLayer, batchnorm_backward, batchnorm_forward
from .conv import ConvLayer, conv2d_backward, conv2d_forward, conv2d_reference
from .dense import DenseLayer, FlattenLayer, dense_backward, dense_forward
from .gradient_check import GradientCheckReport, gradient_check
from .loss import batch_cross_entropy, softmax, softmax_cross_entropy
from .network import Network, build_network
from .pooling import PoolLayer, maxpool_backward, maxpool_forward
from .tensor_core import Rng, Tensor, child_seed, ensure_finite, he_normal_init, make_rng, reshape, tensor_new
