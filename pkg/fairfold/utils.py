import hashlib
import yaml

def calc_hash(val):
    return hashlib.sha224(str(val).encode('utf-8')).hexdigest()

def hash64(val):
    """First 8 bytes of the SHA-224 digest of str(val), as an unsigned integer"""
    digest = hashlib.sha224(str(val).encode('utf-8')).digest()
    return int.from_bytes(digest[:8], 'big')

def normalize_key(key):
    return key.strip().replace('-', '_')

def update_keys(dictionary, f):
    if type(dictionary) is dict:
        return {f(key): update_keys(val, f) for key, val in dictionary.items()}
    else:
        return dictionary

def parse_key_value_lines(lines):
    """
    Parse `key=value` lines into a dict.

    Blank lines and lines starting with # are ignored, values are read
    as YAML scalars so numbers and booleans come out typed.
    Repeated keys accumulate into a list.
    """
    config = {}
    for line_no, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        if '=' not in line:
            raise ValueError(f'Line {line_no}: expected key=value, got {line!r}')

        key, value = line.split('=', 1)
        key = normalize_key(key)
        value = yaml.safe_load(value.strip()) if value.strip() else None

        if key in config:
            if not isinstance(config[key], list):
                config[key] = [config[key]]
            config[key].append(value)
        else:
            config[key] = value
    return config

def split_csv_list(value):
    """'a, b,c' -> ['a', 'b', 'c']; lists pass through"""
    if value is None:
        return []
    if isinstance(value, (list, tuple)):
        items = []
        for v in value:
            items.extend(split_csv_list(v))
        return items
    return [item.strip() for item in str(value).split(',') if item.strip()]
