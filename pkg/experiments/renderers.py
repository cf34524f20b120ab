"""
Report rendering.

JSON documents carry every float with 17 significant digits so a report
round-trips exactly; infinities are written as the strings "+inf" / "-inf".
"""
import json
import math

from rest_framework.renderers import JSONRenderer
from rest_framework.utils.encoders import JSONEncoder


def _floatstr(value):
    if math.isnan(value):
        raise ValueError('NaN has no place in a report')
    if math.isinf(value):
        return '"+inf"' if value > 0 else '"-inf"'
    text = format(value, '.17g')
    if '.' not in text and 'e' not in text:
        text += '.0'
    return text


class ReportEncoder(JSONEncoder):
    def iterencode(self, o, _one_shot=False):
        indent = self.indent
        if indent is not None and not isinstance(indent, str):
            indent = ' ' * indent
        encode_str = json.encoder.encode_basestring_ascii if self.ensure_ascii else json.encoder.encode_basestring
        _iterencode = json.encoder._make_iterencode(
            {} if self.check_circular else None,
            self.default,
            encode_str,
            indent,
            _floatstr,
            self.key_separator,
            self.item_separator,
            self.sort_keys,
            self.skipkeys,
            _one_shot,
        )
        return _iterencode(o, 0)


class ReportRenderer(JSONRenderer):
    encoder_class = ReportEncoder

    def render(self, data, accepted_media_type=None, renderer_context=None):
        renderer_context = renderer_context or {'indent': 2}
        return super().render(data, accepted_media_type, renderer_context)


def render(result, output='json'):
    """Report text for stdout."""
    if output == 'csv':
        return result.dataset.export('csv')
    return ReportRenderer().render(result.document).decode('utf-8') + '\n'
