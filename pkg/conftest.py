import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "sumfreelab.settings")
django.setup()
