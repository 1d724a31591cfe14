"""
Reference Instance Writer for Fourier-NC
Creates the sample instance files used in the README walkthrough under data/
"""
import sys
import os

# Add parent directory to path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from pathlib import Path
import logging

from fourier_nc.config import settings, validate_settings
from fourier_nc.services.analytics_service import AnalyticsService
from fourier_nc.services.instance_service import InstanceService
from fourier_nc.services.symmetric_service import SymmetricService
from fourier_nc.services.topology_service import TopologyService

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


def build_instances(seed: int):
    """Reference instances keyed by file name"""
    triangle = InstanceService.make_graph(3, [(0, 1), (0, 2), (1, 2)])
    oriented_triangle = InstanceService.make_graph(3, [(0, 1), (1, 2), (2, 0)], directed=True)
    hamming = SymmetricService.hamming_cost(3)

    validation = {
        f"validation-{name.replace(' ', '-').lower()}.json": instance
        for name, _, instance in AnalyticsService.validation_instances(seed)
    }
    return {
        "k4-planted.json": TopologyService.convergence_instance(seed=seed),
        "frustrated-triangle.json": AnalyticsService.maxcut_reduce(triangle),
        "oriented-triangle-c3.json": TopologyService.planted(oriented_triangle, 3, [0, 2, 1], name="oriented-triangle"),
        "cycle-chord-random.json": TopologyService.with_costs(
            TopologyService.cycle_with_chord(), 4, TopologyService.random_table_costs(), seed, name="cycle-chord"
        ),
        "s3-hamming-pair.json": InstanceService.make_instance(
            InstanceService.make_graph(2, [(0, 1)]), "symmetric", 3, [hamming], name="s3-hamming"
        ),
        **validation,
    }


def write_reference_instances(directory: str = "data", seed: int = None) -> int:
    """Write every reference instance as JSON; returns the number of files"""
    seed = settings.default_seed if seed is None else seed
    target = Path(directory)
    target.mkdir(parents=True, exist_ok=True)

    logger.info(f"Writing reference instances to {target}/ (seed={seed})")
    instances = build_instances(seed)
    for name, instance in instances.items():
        InstanceService.save_instance(instance, target / name)
        logger.info(f"  - {name}: n={instance.n}, m={instance.m}, {instance.domain.value}({instance.order})")

    logger.info(f"Wrote {len(instances)} instance files")
    return len(instances)


if __name__ == "__main__":
    try:
        validate_settings()
        write_reference_instances()
    except Exception as e:
        logger.error(f"Error writing reference instances: {e}")
        sys.exit(1)
