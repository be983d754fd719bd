"""Configure Django before pytest collects the SimpleTestCase suites."""
import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'grad_regress.settings')
django.setup()
