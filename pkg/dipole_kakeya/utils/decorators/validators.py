import inspect
import math
from functools import wraps
from typing import Any, Callable, Dict

from dipole_kakeya.exceptions import InvalidParameterError


def _as_number(arg_name: str, value: Any) -> float:
    try:
        return float(value) if not isinstance(value, (int, float)) else value
    except (ValueError, TypeError):
        raise InvalidParameterError(f"{arg_name} must be a number")


def _check_rules(arg_name: str, value: Any, rules: Dict[str, Any]) -> list[str]:
    errors = []

    # Validate min / max (inclusive)
    if "min" in rules:
        min_rule = rules["min"]
        min_value = min_rule.get("value")
        message = min_rule.get("message", f"{arg_name} must be at least {min_value}")
        if _as_number(arg_name, value) < min_value:
            errors.append(message)

    if "max" in rules:
        max_rule = rules["max"]
        max_value = max_rule.get("value")
        message = max_rule.get("message", f"{arg_name} must be at most {max_value}")
        if _as_number(arg_name, value) > max_value:
            errors.append(message)

    # Validate exclusiveMin / exclusiveMax
    if "exclusiveMin" in rules:
        rule = rules["exclusiveMin"]
        bound = rule.get("value")
        message = rule.get("message", f"{arg_name} must be greater than {bound}")
        if _as_number(arg_name, value) <= bound:
            errors.append(message)

    if "exclusiveMax" in rules:
        rule = rules["exclusiveMax"]
        bound = rule.get("value")
        message = rule.get("message", f"{arg_name} must be less than {bound}")
        if _as_number(arg_name, value) >= bound:
            errors.append(message)

    # Finite numbers only
    if rules.get("finite"):
        if not math.isfinite(_as_number(arg_name, value)):
            errors.append(f"{arg_name} must be finite")

    # Custom validate function
    if "validate" in rules:
        validate_func = rules["validate"]
        if callable(validate_func):
            result = validate_func(value)
            if result is False:
                errors.append(f"{arg_name} is invalid")
            elif isinstance(result, str):
                errors.append(result)

    return errors


def validate_args(validation_rules: Dict[str, Dict[str, Any]]):
    """
    Decorator to validate numeric function arguments with declarative rules.

    Args:
        validation_rules: Dictionary mapping argument names to their validation rules.
            Supported rules:
            - required: bool or dict with 'message' key
            - min / max: dict with 'value' and 'message' keys (inclusive bounds)
            - exclusiveMin / exclusiveMax: dict with 'value' and 'message' keys
            - finite: bool, rejects NaN and infinities
            - validate: callable that takes the value and returns True/False or error message

    Example:
        @validate_args({
            'delta': {
                'required': True,
                'exclusiveMin': {'value': 0, 'message': 'delta must be positive'},
            },
            'gamma': {
                'exclusiveMin': {'value': 0},
                'exclusiveMax': {'value': 0.5},
            },
        })
        def classify(delta: float, gamma: float):
            ...

    Raises:
        InvalidParameterError: with the message of the first failing rule.
    """

    def decorator(func: Callable) -> Callable:
        sig = inspect.signature(func)

        @wraps(func)
        def wrapper(*args, **kwargs):
            bound_args = sig.bind(*args, **kwargs)
            bound_args.apply_defaults()

            for arg_name, rules in validation_rules.items():
                if arg_name not in bound_args.arguments:
                    continue

                value = bound_args.arguments[arg_name]

                # Check required rule
                if "required" in rules:
                    required_rule = rules["required"]
                    if isinstance(required_rule, dict):
                        required = True
                        required_message = required_rule.get(
                            "message", f"{arg_name} is required"
                        )
                    else:
                        required = required_rule
                        required_message = f"{arg_name} is required"

                    if required and value is None:
                        raise InvalidParameterError(required_message)

                # Skip other validations if value is None and not required
                if value is None:
                    continue

                errors = _check_rules(arg_name, value, rules)
                if errors:
                    raise InvalidParameterError(errors[0])

            return func(*args, **kwargs)

        return wrapper

    return decorator


POSITIVE = {"required": True, "finite": True, "exclusiveMin": {"value": 0}}
