"""网络结构生成包.

提供广义 LeNet、VGG-16 与增强版 VGG-16 的结构描述、守恒律审计和序列化。
"""

from .arch_spec import ArchFamily, ArchSpec, LayerSpec
from .builders import build_arch, build_lenet, build_vgg16, build_vgg16_enhanced, round_half_away
from .conservation import ConservationReport, conservation_report
from .serialization import dumps_spec, load_spec, loads_spec, save_spec, spec_from_dict, spec_to_dict
