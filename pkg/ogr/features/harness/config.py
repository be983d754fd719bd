import logging
from collections.abc import Mapping

import yaml
from django.conf import settings

from ...exceptions import ConfigurationError
from ...serializers import validate_or_raise
from ..problems.services import make_problem
from .models import ExperimentConfig, OptimizerSpec, ProblemSpec
from .serializers import ExperimentConfigSerializer

logger = logging.getLogger(__name__)


def plain(value):
    """Nested serializer output as plain dicts and lists."""
    if isinstance(value, Mapping):
        return {key: plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(item) for item in value]
    return value


def key_lines(node, path=(), lines=None):
    """Map dotted key paths (list items by index) to 1-based YAML lines."""
    if lines is None:
        lines = {}
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            child = path + (str(key_node.value),)
            lines['.'.join(child)] = key_node.start_mark.line + 1
            key_lines(value_node, child, lines)
    elif isinstance(node, yaml.SequenceNode):
        for index, item in enumerate(node.value):
            child = path + (str(index),)
            lines['.'.join(child)] = item.start_mark.line + 1
            key_lines(item, child, lines)
    return lines


def line_of(lines, key):
    """Line of ``key`` or of its nearest ancestor present in the text."""
    parts = (key or '').split('.')
    while parts and parts[0]:
        found = lines.get('.'.join(parts))
        if found is not None:
            return found
        parts.pop()
    return None


def default_stride(kind):
    return settings.OGR_MLP_STRIDE if kind == 'mlp' else settings.OGR_DEFAULT_STRIDE


def load_config(data):
    """
    Validate a configuration mapping into an ExperimentConfig with every
    default filled in.
    """
    if not isinstance(data, Mapping):
        raise ConfigurationError('configuration must be a mapping of keys to values')
    validated = plain(validate_or_raise(ExperimentConfigSerializer, dict(data)))

    problem = ProblemSpec(kind=validated['problem']['kind'], params=validated['problem']['params'])
    optimizers = [OptimizerSpec(**spec) for spec in validated['optimizers']]

    try:
        D = make_problem(problem.kind, problem.params).dim
    except ConfigurationError as exc:
        raise ConfigurationError(exc.message, key=f'problem.{exc.key}' if exc.key else 'problem') from exc
    for index, spec in enumerate(optimizers):
        try:
            spec.build_config()
        except ConfigurationError as exc:
            raise ConfigurationError(exc.message, key=f'optimizers.{index}.params.{exc.key}') from exc
        if spec.kind == 'ogr' and spec.params['d'] > D:
            raise ConfigurationError(
                f'must not exceed the problem dimension D={D}, got {spec.params["d"]}',
                key=f'optimizers.{index}.params.d',
            )

    stride = validated['stride']
    if stride is None:
        stride = default_stride(problem.kind)
    return ExperimentConfig(
        name=validated['name'],
        problem=problem,
        optimizers=optimizers,
        budget=validated['budget'],
        seeds=validated['seeds'],
        stride=stride,
        threshold=validated['threshold'],
        common_random_numbers=validated['common_random_numbers'],
        out=validated['out'],
    )


def parse_config(text):
    """
    Parse YAML configuration text.

    Errors name the offending key and the line it sits on (the line of the
    closest enclosing key when the key itself is missing).
    """
    try:
        data = yaml.safe_load(text)
        node = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, 'problem_mark', None)
        raise ConfigurationError(
            f'malformed YAML: {getattr(exc, "problem", None) or exc}',
            line=None if mark is None else mark.line + 1,
        ) from exc

    lines = key_lines(node) if node is not None else {}
    try:
        config = load_config(data)
    except ConfigurationError as exc:
        raise ConfigurationError(exc.message, key=exc.key, line=line_of(lines, exc.key)) from exc
    logger.debug(f'Parsed experiment {config.name!r} with {len(config.optimizers)} optimizers')
    return config


def emit_config(config):
    """YAML text that parses back to ``config``."""
    return yaml.safe_dump(config.to_dict(), sort_keys=False, default_flow_style=False)
